#pragma once

#include <map>
#include <vector>

#include "corridor/rng.hpp"
#include "corridor/sim.hpp"

namespace corridor::testing {

// One random legal joint action per decision round: per-agent split plus a
// shared global duration, drawn uniformly from the action grid.
inline std::vector<SignalPlan> random_plans(const Simulator& sim,
                                            const ActionSpaceSpec& spec,
                                            Rng& rng) {
  std::vector<SignalPlan> plans;
  const int c = spec.global_values[rng.uniform_int(spec.global_cardinality())];
  for (int i = 0; i < sim.config().num_intersections; ++i) {
    const double p = spec.local_values[rng.uniform_int(spec.local_cardinality())];
    FixedTimings t;
    SignalPlan plan = decode_plan(p, c, t);
    plan.intersection = i;
    plan.phase_pair = sim.next_phase_pair(i);
    plans.push_back(plan);
  }
  return plans;
}

// True if movements of two distinct phases see green at once anywhere.
inline bool any_conflicting_green(const Simulator& sim) {
  for (int i = 0; i < sim.config().num_intersections; ++i) {
    const auto& c = sim.state().controllers[i];
    bool green_phase[4] = {false, false, false, false};
    for (int ap = 0; ap < 4; ++ap)
      for (Movement mv : {Movement::Through, Movement::Left, Movement::Right})
        if (c.color(static_cast<Approach>(ap), mv) == SignalColor::Green)
          green_phase[static_cast<int>(phase_for(static_cast<Approach>(ap), mv))] =
              true;
    if (green_phase[0] + green_phase[1] + green_phase[2] + green_phase[3] > 1)
      return true;
  }
  return false;
}

struct GrammarReport {
  int grammar_violations = 0;
  int min_green_violations = 0;
  int phase_order_violations = 0;
};

// Validates each intersection's emitted interval string against
// (green+ amber^3 allred^2)+ with phases advancing A->B->C->D->A. The first
// and last run may be truncated (mid-cycle starts, horizon cut).
inline GrammarReport check_interval_grammar(const std::vector<StepTraceRow>& trace,
                                            int num_intersections,
                                            const FixedTimings& t) {
  GrammarReport rep;
  struct Run {
    Phase phase;
    IntervalKind kind;
    int len = 0;
  };
  for (int i = 0; i < num_intersections; ++i) {
    std::vector<Run> runs;
    for (const auto& row : trace) {
      if (row.intersection != i) continue;
      if (!runs.empty() && runs.back().phase == row.phase &&
          runs.back().kind == row.kind) {
        ++runs.back().len;
      } else {
        runs.push_back({row.phase, row.kind, 1});
      }
    }
    for (size_t k = 0; k < runs.size(); ++k) {
      const bool edge = k == 0 || k + 1 == runs.size();
      const Run& r = runs[k];
      if (r.kind == IntervalKind::Amber && !edge && r.len != t.amber_s)
        ++rep.grammar_violations;
      if (r.kind == IntervalKind::AllRed && !edge && r.len != t.all_red_s)
        ++rep.grammar_violations;
      if (r.kind == IntervalKind::Green && !edge && r.len < t.min_green_s)
        ++rep.min_green_violations;
      if (k > 0) {
        const Run& prev = runs[k - 1];
        const bool ok =
            (prev.kind == IntervalKind::Green && r.kind == IntervalKind::Amber &&
             prev.phase == r.phase) ||
            (prev.kind == IntervalKind::Amber && r.kind == IntervalKind::AllRed &&
             prev.phase == r.phase) ||
            (prev.kind == IntervalKind::AllRed && r.kind == IntervalKind::Green &&
             static_cast<int>(r.phase) ==
                 (static_cast<int>(prev.phase) + 1) % 4);
        if (!ok) ++rep.grammar_violations;
      }
    }
    // amber and all-red must always separate two greens: covered by the
    // transition rule above
  }
  return rep;
}

}  // namespace corridor::testing
