#pragma once

#include <array>
#include <vector>

#include "corridor/sim.hpp"

namespace corridor {

// Flat observation layout: per-agent cell grids [O V A P] of shape 16 x l
// (row r = 4 * approach + lane, cell 0 at the stop line), then 8 pedestrian
// counts per agent, then a 4-wide phase one-hot per agent.
struct StateLayout {
  int agents = 0;
  int cells = 0;

  int grid() const { return 16 * cells; }
  int agent_c() const { return 4 * grid(); }
  int c_size() const { return agents * agent_c(); }
  int n_size() const { return agents * 8; }
  int g_size() const { return agents * 4; }
  int size() const { return c_size() + n_size() + g_size(); }

  int o_offset(int agent) const { return agent * agent_c(); }
  int v_offset(int agent) const { return o_offset(agent) + grid(); }
  int a_offset(int agent) const { return o_offset(agent) + 2 * grid(); }
  int p_offset(int agent) const { return o_offset(agent) + 3 * grid(); }
  int ped_offset(int agent) const { return c_size() + agent * 8; }
  int phase_offset(int agent) const { return c_size() + n_size() + agent * 4; }

  int row(int approach, int lane) const { return 4 * approach + lane; }
  int cell_index(int row_, int cell) const { return row_ * cells + cell; }

  // fixed affine normalization applied at the network input:
  // V/60, A/4, P/10, pedestrian counts/20, O and one-hots unscaled
  std::vector<double> input_scale() const;

  bool operator==(const StateLayout&) const = default;
};

struct StateVector {
  StateLayout layout;
  std::vector<double> values;
};

std::array<double, 4> encode_phase_onehot(Phase phase);

StateVector encode_state(const CorridorState& state, const CorridorConfig& cfg);

}  // namespace corridor
