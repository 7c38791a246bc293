#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "corridor/rng.hpp"

namespace corridor {

// Raised for any invalid configuration value; `field` is the dotted path of
// the offending entry so the CLI can report it verbatim.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class InfeasibleDurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OversaturationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class VehClass { Car, Bus };
enum class Movement { Through, Left, Right };
enum class Phase { A = 0, B = 1, C = 2, D = 3 };

// Incoming approaches of one intersection, named by the compass side the
// traffic arrives from. West carries eastbound corridor traffic, East
// westbound; North/South are the side streets.
enum class Approach { West = 0, South = 1, East = 2, North = 3 };

struct CorridorConfig {
  int num_intersections = 3;
  int approaches_per_intersection = 4;
  int lanes_per_approach = 4;
  int cells_per_lane = 10;
  double cell_length_m = 6.0;
  std::vector<double> link_lengths_m;  // num_intersections - 1 entries
  int ped_zones_per_intersection = 8;
  double sim_step_s = 1.0;
  double design_speed_kmh = 50.0;

  // car-following parameters (scenario-tunable, sane urban defaults)
  double accel_mps2 = 2.5;
  double decel_mps2 = 4.0;
  double comfort_decel_mps2 = 3.0;
  double car_length_m = 5.0;
  double bus_length_m = 12.0;
  double min_gap_m = 2.0;
  double ped_service_rate_per_s = 2.0;

  double design_speed_mps() const { return design_speed_kmh / 3.6; }
  // entry approaches and side streets span exactly the encoded cell window
  double entry_lane_length_m() const { return cells_per_lane * cell_length_m; }
  double link_length(int intersection, Approach ap) const;

  void validate() const;
};

struct OccupantDist {
  std::vector<int> values;
  std::vector<double> probs;

  int sample(Rng& rng) const;
  double mean() const;
  void validate(const std::string& field, int min_value) const;

  static OccupantDist default_car();  // {1..5}, mean 1.5
  static OccupantDist default_bus();  // {5..50}, mean 14.75
};

struct VehicleFlow {
  std::string from;  // "W", "E", "N<i>", "S<i>"
  std::string to;
  double rate_veh_h = 0.0;
  double bus_share = 0.0;
};

struct PedFlow {
  int intersection = 0;
  int zone = 0;
  double rate_ped_h = 0.0;
};

struct DemandConfig {
  double horizon_s = 3600.0;
  std::vector<VehicleFlow> vehicle_flows;
  OccupantDist car_occupants = OccupantDist::default_car();
  OccupantDist bus_occupants = OccupantDist::default_bus();
  std::vector<PedFlow> pedestrian_flows;

  void validate(const CorridorConfig& cfg) const;
};

struct FixedTimings {
  int amber_s = 3;
  int all_red_s = 2;
  int min_green_s = 10;

  int intergreen_s() const { return amber_s + all_red_s; }
  void validate() const;
};

struct ActionSpaceSpec {
  int num_agents = 3;
  std::vector<double> local_values;  // green split p1 options
  std::vector<int> global_values;    // half-cycle duration options, seconds

  int local_cardinality() const { return static_cast<int>(local_values.size()); }
  int global_cardinality() const { return static_cast<int>(global_values.size()); }

  // 49 split fractions 0.02..0.98 and durations c_min..c_max inclusive
  static ActionSpaceSpec defaults(int num_agents, int c_min_s = 30, int c_max_s = 70);

  void validate() const;
};

}  // namespace corridor
