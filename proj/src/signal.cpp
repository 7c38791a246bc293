#include "corridor/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace corridor {

SignalPlan decode_plan(double p1, int total_s, const FixedTimings& timings) {
  const int budget = total_s - 2 * timings.intergreen_s();
  if (budget < 2 * timings.min_green_s)
    throw InfeasibleDurationError("half cycle of " + std::to_string(total_s) +
                                  " s cannot grant two minimum greens");
  int g1 = static_cast<int>(std::floor(p1 * budget + 0.5));
  g1 = std::max(g1, timings.min_green_s);
  int g2 = budget - g1;
  if (g2 < timings.min_green_s) {
    g2 = timings.min_green_s;
    g1 = budget - g2;
  }
  SignalPlan plan;
  plan.green_1 = g1;
  plan.green_2 = g2;
  plan.total = total_s;
  return plan;
}

double webster_cycle_raw(const std::vector<double>& ratios, double lost_time_s) {
  if (lost_time_s <= 0)
    throw ConfigError("lost_time_s", "must be > 0");
  const double y = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  if (y >= 1.0)
    throw OversaturationError("critical flow ratio sum " + std::to_string(y) +
                              " >= 1, no finite Webster cycle");
  return (1.5 * lost_time_s + 5.0) / (1.0 - y);
}

double webster_cycle(const std::vector<double>& ratios, double lost_time_s) {
  return std::clamp(webster_cycle_raw(ratios, lost_time_s), 30.0, 150.0);
}

std::vector<int> green_split(int cycle_s, const std::vector<double>& ratios,
                             const FixedTimings& timings) {
  const int n = static_cast<int>(ratios.size());
  const int budget = cycle_s - n * timings.intergreen_s();
  if (budget < n * timings.min_green_s)
    throw InfeasibleDurationError("cycle of " + std::to_string(cycle_s) +
                                  " s cannot grant " + std::to_string(n) +
                                  " minimum greens");
  const double y = std::accumulate(ratios.begin(), ratios.end(), 0.0);

  std::vector<int> greens(n);
  std::vector<double> frac(n);
  int assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double share = y > 0 ? budget * ratios[i] / y
                               : static_cast<double>(budget) / n;
    greens[i] = static_cast<int>(std::floor(share));
    frac[i] = share - greens[i];
    assigned += greens[i];
  }
  // largest-remainder distribution of the leftover seconds
  for (int left = budget - assigned; left > 0; --left) {
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (frac[i] > frac[best]) best = i;
    ++greens[best];
    frac[best] = -1.0;
  }
  // raise short phases to min_green, taking seconds from the longest
  for (int i = 0; i < n; ++i) {
    while (greens[i] < timings.min_green_s) {
      int donor = -1;
      for (int j = 0; j < n; ++j)
        if (greens[j] > timings.min_green_s &&
            (donor < 0 || greens[j] > greens[donor]))
          donor = j;
      --greens[donor];
      ++greens[i];
    }
  }
  return greens;
}

std::vector<double> green_wave_offsets(const std::vector<double>& link_lengths_m,
                                       double design_speed_kmh) {
  if (design_speed_kmh <= 0)
    throw ConfigError("design_speed_kmh", "must be > 0");
  const double v = design_speed_kmh / 3.6;
  std::vector<double> offsets{0.0};
  double cum = 0.0;
  for (double d : link_lengths_m) {
    cum += d;
    offsets.push_back(cum / v);
  }
  return offsets;
}

namespace {

FixedSchedule webster_schedule(int intersection, const PhaseRatios& ratios,
                               double lost_time_s, const FixedTimings& timings) {
  std::vector<double> r(ratios.begin(), ratios.end());
  double cycle;
  try {
    cycle = webster_cycle(r, lost_time_s);
  } catch (const OversaturationError&) {
    cycle = 150.0;  // saturated: fall back to the max cycle
  }
  // Webster's optimum can be shorter than four min-greens plus intergreens;
  // raise it to the feasibility floor before splitting.
  const int floor_s = 4 * (timings.min_green_s + timings.intergreen_s());
  const int cycle_s = std::max(static_cast<int>(std::lround(cycle)), floor_s);

  FixedSchedule sched;
  sched.intersection = intersection;
  sched.timings = timings;
  auto greens = green_split(cycle_s, r, timings);
  std::copy(greens.begin(), greens.end(), sched.greens.begin());
  return sched;
}

}  // namespace

std::vector<FixedSchedule> build_fs_wf(const std::vector<PhaseRatios>& ratios,
                                       double lost_time_s,
                                       const FixedTimings& timings) {
  std::vector<FixedSchedule> out;
  for (size_t i = 0; i < ratios.size(); ++i)
    out.push_back(webster_schedule(static_cast<int>(i), ratios[i], lost_time_s,
                                   timings));
  return out;
}

std::vector<FixedSchedule> build_fs_gw(const std::vector<PhaseRatios>& ratios,
                                       double lost_time_s,
                                       const FixedTimings& timings,
                                       const std::vector<double>& link_lengths_m,
                                       double design_speed_kmh) {
  auto out = build_fs_wf(ratios, lost_time_s, timings);
  auto offsets = green_wave_offsets(link_lengths_m, design_speed_kmh);
  for (size_t i = 0; i < out.size() && i < offsets.size(); ++i)
    out[i].offset_s = offsets[i];
  return out;
}

}  // namespace corridor
