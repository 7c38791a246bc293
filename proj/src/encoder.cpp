#include "corridor/encoder.hpp"

#include <cmath>

namespace corridor {

std::vector<double> StateLayout::input_scale() const {
  std::vector<double> s(size(), 1.0);
  for (int a = 0; a < agents; ++a) {
    for (int k = 0; k < grid(); ++k) {
      s[v_offset(a) + k] = 1.0 / 60.0;
      s[a_offset(a) + k] = 1.0 / 4.0;
      s[p_offset(a) + k] = 1.0 / 10.0;
    }
    for (int k = 0; k < 8; ++k) s[ped_offset(a) + k] = 1.0 / 20.0;
  }
  return s;
}

std::array<double, 4> encode_phase_onehot(Phase phase) {
  std::array<double, 4> g{0, 0, 0, 0};
  g[static_cast<int>(phase)] = 1.0;
  return g;
}

StateVector encode_state(const CorridorState& state, const CorridorConfig& cfg) {
  StateVector sv;
  sv.layout = {cfg.num_intersections, cfg.cells_per_lane};
  sv.values.assign(sv.layout.size(), 0.0);
  const StateLayout& L = sv.layout;

  for (const auto& link : state.links) {
    const int agent = link.intersection;
    for (int lane = 0; lane < static_cast<int>(link.lanes.size()); ++lane) {
      const int row = L.row(static_cast<int>(link.approach), lane);
      for (const auto& v : link.lanes[lane].veh) {
        const double dist = link.length_m - v.front_m;
        const int cell = static_cast<int>(std::floor(dist / cfg.cell_length_m));
        if (cell < 0 || cell >= cfg.cells_per_lane) continue;
        const int idx = L.cell_index(row, cell);
        // lane order is front-first, so the first writer is the front-most
        // vehicle; extra vehicles in a dense cell only add their occupants
        if (sv.values[L.o_offset(agent) + idx] == 0.0) {
          sv.values[L.o_offset(agent) + idx] = 1.0;
          sv.values[L.v_offset(agent) + idx] = v.speed_kmh();
          sv.values[L.a_offset(agent) + idx] = v.accel_mps2;
        }
        sv.values[L.p_offset(agent) + idx] += v.occupants;
      }
    }
  }
  for (int i = 0; i < cfg.num_intersections; ++i) {
    for (int z = 0; z < cfg.ped_zones_per_intersection; ++z)
      sv.values[L.ped_offset(i) + z] =
          static_cast<double>(state.ped_queue(i, z));
    const auto onehot = encode_phase_onehot(state.controllers[i].phase());
    for (int k = 0; k < 4; ++k) sv.values[L.phase_offset(i) + k] = onehot[k];
  }
  return sv;
}

}  // namespace corridor
