#pragma once

#include <array>
#include <vector>

#include "corridor/config.hpp"

namespace corridor {

// Timing of the next two phases (one half cycle) at one intersection.
// total = green_1 + green_2 + 2 * (amber + all_red).
struct SignalPlan {
  int intersection = 0;
  std::array<Phase, 2> phase_pair{Phase::A, Phase::B};
  int green_1 = 0;
  int green_2 = 0;
  int total = 0;
};

// Turns a split fraction and a half-cycle duration into integer greens.
// green_1 is round-half-up of p1 * budget, then both greens are clamped to
// min_green with green_2 absorbing the remainder, so the budget identity is
// exact in whole seconds.
SignalPlan decode_plan(double p1, int total_s, const FixedTimings& timings);

// Webster's optimal cycle (1.5 L + 5) / (1 - Y). Throws OversaturationError
// when Y >= 1. The raw variant is unclamped; webster_cycle clamps to
// [30, 150] s.
double webster_cycle_raw(const std::vector<double>& critical_flow_ratios,
                         double lost_time_s);
double webster_cycle(const std::vector<double>& critical_flow_ratios,
                     double lost_time_s);

// Splits cycle - n * intergreen seconds of green across n phases in
// proportion to the flow ratios, integerized by largest remainder and
// repaired to respect min_green.
std::vector<int> green_split(int cycle_s, const std::vector<double>& ratios,
                             const FixedTimings& timings);

// Offset of each intersection relative to the westernmost reference, from
// cumulative link distance at the design speed. Returns num links + 1 values,
// offsets[0] = 0.
std::vector<double> green_wave_offsets(const std::vector<double>& link_lengths_m,
                                       double design_speed_kmh);

// One intersection's repeating four-phase fixed-time pattern. offset_s shifts
// the whole pattern in time (the controller starts mid-cycle), which is how
// the green wave is realised.
struct FixedSchedule {
  int intersection = 0;
  std::array<int, 4> greens{};  // seconds for phases A..D
  FixedTimings timings;
  double offset_s = 0.0;

  int cycle_s() const {
    return greens[0] + greens[1] + greens[2] + greens[3] +
           4 * timings.intergreen_s();
  }
};

// Critical flow ratios per phase (A..D) for every intersection, as produced
// by assign_phase_ratios() in sim.hpp.
using PhaseRatios = std::array<double, 4>;

// FS-WF: per-intersection Webster cycle + proportional green split. The
// cycle is raised to the 4-phase feasibility floor when Webster's optimum
// cannot grant four minimum greens.
std::vector<FixedSchedule> build_fs_wf(const std::vector<PhaseRatios>& ratios,
                                       double lost_time_s,
                                       const FixedTimings& timings);

// FS-GW: FS-WF timings plus distance/speed offsets from the westernmost
// intersection. With zero link lengths this is exactly FS-WF.
std::vector<FixedSchedule> build_fs_gw(const std::vector<PhaseRatios>& ratios,
                                       double lost_time_s,
                                       const FixedTimings& timings,
                                       const std::vector<double>& link_lengths_m,
                                       double design_speed_kmh);

}  // namespace corridor
