#pragma once

#include <optional>
#include <string>
#include <vector>

namespace corridor {

// A traveler is delayed below this vehicle speed (strict comparison).
inline constexpr double kDelaySpeedKmh = 5.0;

bool is_vehicle_delayed(double speed_kmh, double threshold_kmh = kDelaySpeedKmh);

// Everyone delayed at one timestep: occupant counts of delayed vehicles and
// per-intersection waiting-pedestrian counts.
struct DelaySnapshot {
  long long t = 0;
  std::vector<int> delayed_vehicle_occupants;
  std::vector<long long> delayed_pedestrians;  // one entry per intersection

  long long delayed_vehicle_count() const {
    return static_cast<long long>(delayed_vehicle_occupants.size());
  }
  long long person_count() const;
  long long pedestrian_count() const;
};

// Negative count of delayed travelers, occupant-weighted.
double compute_reward(const DelaySnapshot& snap, double w_veh = 1.0,
                      double w_ped = 1.0);

struct TripRecord {
  char mode = 'v';  // 'v' vehicle, 'p' pedestrian
  int occupants = 1;
  double entry_s = 0.0;
  double exit_s = 0.0;
  double delay_s = 0.0;           // seconds below the speed threshold / in queue
  double delay_freeflow_s = 0.0;  // travel time minus free-flow travel time
};

struct MetricsReport {
  double aid = 0.0;   // person-seconds of delay over the horizon
  double pcd = 0.0;   // aid / total traveler demand
  double avds = 0.0;  // mean delayed vehicles per second
  double apds = 0.0;  // mean delayed pedestrians per second
  std::optional<double> adv;           // mean delay per completed vehicle trip
  std::optional<double> awtp;          // mean wait per served pedestrian
  std::optional<double> adv_freeflow;  // adv under the free-flow definition
  double horizon_s = 0.0;
  double demand = 0.0;
  long long n_vehicles = 0;
  long long n_pedestrians = 0;
};

MetricsReport accumulate_metrics(const std::vector<DelaySnapshot>& snapshots,
                                 const std::vector<TripRecord>& trips,
                                 double demand);

// Percentage AID improvement of `ours` over `baseline`. baseline must be > 0.
double improvement(double baseline_aid, double ours_aid);

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1)
};

struct SweepStats {
  MetricStat aid, pcd, avds, apds, adv, awtp;
  int n = 0;
};

// Mean and sample standard deviation across per-seed reports; needs >= 2.
SweepStats seed_sweep_stats(const std::vector<MetricsReport>& reports);

// One-sided paired comparison: p-value for mean(a - b) > 0 under a paired
// t-test. Used to test "policy b beats policy a" seed by seed.
double paired_one_sided_p(const std::vector<double>& a,
                          const std::vector<double>& b);

}  // namespace corridor
