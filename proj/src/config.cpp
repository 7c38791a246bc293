#include "corridor/config.hpp"

#include <cmath>
#include <numeric>

namespace corridor {

double CorridorConfig::link_length(int intersection, Approach ap) const {
  switch (ap) {
    case Approach::West:
      return intersection == 0 ? entry_lane_length_m()
                               : link_lengths_m[intersection - 1];
    case Approach::East:
      return intersection == num_intersections - 1
                 ? entry_lane_length_m()
                 : link_lengths_m[intersection];
    default:
      return entry_lane_length_m();
  }
}

void CorridorConfig::validate() const {
  if (num_intersections < 1)
    throw ConfigError("corridor.num_intersections", "must be >= 1");
  if (approaches_per_intersection != 4)
    throw ConfigError("corridor.approaches_per_intersection",
                      "must be 4 (two corridor directions plus two side streets)");
  if (lanes_per_approach < 1 || lanes_per_approach > 4)
    throw ConfigError("corridor.lanes_per_approach", "must be in [1, 4]");
  if (cells_per_lane < 1)
    throw ConfigError("corridor.cells_per_lane", "must be >= 1");
  if (cell_length_m <= 0)
    throw ConfigError("corridor.cell_length_m", "must be > 0");
  if (sim_step_s <= 0)
    throw ConfigError("corridor.sim_step_s", "must be > 0");
  if (design_speed_kmh <= 0)
    throw ConfigError("corridor.design_speed_kmh", "must be > 0");
  if (static_cast<int>(link_lengths_m.size()) != num_intersections - 1)
    throw ConfigError("corridor.link_lengths_m",
                      "needs exactly num_intersections - 1 entries");
  const double span = entry_lane_length_m();
  for (double len : link_lengths_m) {
    if (len < span)
      throw ConfigError("corridor.link_lengths_m",
                        "each link must cover the encoded cell span (" +
                            std::to_string(span) + " m)");
  }
  if (ped_zones_per_intersection != 8)
    throw ConfigError("corridor.ped_zones_per_intersection", "must be 8");
  if (accel_mps2 <= 0) throw ConfigError("corridor.accel_mps2", "must be > 0");
  if (decel_mps2 <= 0) throw ConfigError("corridor.decel_mps2", "must be > 0");
  if (comfort_decel_mps2 <= 0)
    throw ConfigError("corridor.comfort_decel_mps2", "must be > 0");
  if (car_length_m <= 0) throw ConfigError("corridor.car_length_m", "must be > 0");
  if (bus_length_m <= 0) throw ConfigError("corridor.bus_length_m", "must be > 0");
  if (min_gap_m < 0) throw ConfigError("corridor.min_gap_m", "must be >= 0");
  if (ped_service_rate_per_s <= 0)
    throw ConfigError("corridor.ped_service_rate_per_s", "must be > 0");
}

int OccupantDist::sample(Rng& rng) const {
  double u = rng.uniform01();
  double acc = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    acc += probs[i];
    if (u < acc) return values[i];
  }
  return values.back();
}

double OccupantDist::mean() const {
  double m = 0.0;
  for (size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
  return m;
}

void OccupantDist::validate(const std::string& field, int min_value) const {
  if (values.empty() || values.size() != probs.size())
    throw ConfigError(field, "values and probs must be non-empty and equal length");
  double sum = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < min_value)
      throw ConfigError(field, "occupants must be >= " + std::to_string(min_value));
    if (probs[i] < 0) throw ConfigError(field, "probabilities must be >= 0");
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError(field, "probabilities must sum to 1");
}

OccupantDist OccupantDist::default_car() {
  return {{1, 2, 3, 4, 5}, {0.65, 0.25, 0.06, 0.03, 0.01}};
}

OccupantDist OccupantDist::default_bus() {
  return {{5, 10, 20, 35, 50}, {0.35, 0.30, 0.20, 0.10, 0.05}};
}

void DemandConfig::validate(const CorridorConfig& cfg) const {
  if (horizon_s < 1) throw ConfigError("demand.horizon_s", "must be >= 1");
  for (size_t i = 0; i < vehicle_flows.size(); ++i) {
    const auto& f = vehicle_flows[i];
    const std::string field = "demand.vehicle_flows[" + std::to_string(i) + "]";
    if (f.rate_veh_h < 0) throw ConfigError(field + ".rate_veh_h", "must be >= 0");
    if (f.bus_share < 0 || f.bus_share > 1)
      throw ConfigError(field + ".bus_share", "must be in [0, 1]");
  }
  car_occupants.validate("demand.car_occupants", 1);
  bus_occupants.validate("demand.bus_occupants", 1);
  for (size_t i = 0; i < pedestrian_flows.size(); ++i) {
    const auto& p = pedestrian_flows[i];
    const std::string field = "demand.pedestrian_flows[" + std::to_string(i) + "]";
    if (p.intersection < 0 || p.intersection >= cfg.num_intersections)
      throw ConfigError(field + ".intersection", "out of range");
    if (p.zone < 0 || p.zone >= cfg.ped_zones_per_intersection)
      throw ConfigError(field + ".zone", "out of range");
    if (p.rate_ped_h < 0) throw ConfigError(field + ".rate_ped_h", "must be >= 0");
  }
}

void FixedTimings::validate() const {
  if (amber_s <= 0) throw ConfigError("timings.amber_s", "must be > 0");
  if (all_red_s <= 0) throw ConfigError("timings.all_red_s", "must be > 0");
  if (min_green_s <= 0) throw ConfigError("timings.min_green_s", "must be > 0");
  if (min_green_s < amber_s)
    throw ConfigError("timings.min_green_s", "must be >= amber_s");
}

ActionSpaceSpec ActionSpaceSpec::defaults(int num_agents, int c_min_s, int c_max_s) {
  ActionSpaceSpec spec;
  spec.num_agents = num_agents;
  for (int k = 1; k <= 49; ++k) spec.local_values.push_back(0.02 * k);
  for (int c = c_min_s; c <= c_max_s; ++c) spec.global_values.push_back(c);
  return spec;
}

void ActionSpaceSpec::validate() const {
  if (num_agents < 1) throw ConfigError("action_space.num_agents", "must be >= 1");
  if (local_values.empty())
    throw ConfigError("action_space.local_values", "must be non-empty");
  if (global_values.empty())
    throw ConfigError("action_space.global_values", "must be non-empty");
  for (size_t i = 1; i < local_values.size(); ++i)
    if (local_values[i] <= local_values[i - 1])
      throw ConfigError("action_space.local_values", "must be strictly increasing");
  for (size_t i = 1; i < global_values.size(); ++i)
    if (global_values[i] <= global_values[i - 1])
      throw ConfigError("action_space.global_values", "must be strictly increasing");
  for (double p : local_values)
    if (p <= 0.0 || p >= 1.0)
      throw ConfigError("action_space.local_values", "fractions must be in (0, 1)");
}

}  // namespace corridor
