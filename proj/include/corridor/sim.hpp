#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "corridor/config.hpp"
#include "corridor/metrics.hpp"
#include "corridor/rng.hpp"
#include "corridor/signal.hpp"

namespace corridor {

enum class SignalColor { Green, Amber, Red };
enum class IntervalKind { Green = 0, Amber = 1, AllRed = 2 };

// One leg of a vehicle's path: travel the link feeding `intersection` via
// `approach`, then perform `move` there.
struct RouteHop {
  int intersection = 0;
  Approach approach = Approach::West;
  Movement move = Movement::Through;
};

// Parses "W", "E", "N<i>", "S<i>" endpoints and derives the hop list.
// Throws ConfigError for unreachable or U-turn pairs.
std::vector<RouteHop> build_route(const std::string& from, const std::string& to,
                                  int num_intersections);

struct Vehicle {
  long long id = 0;
  VehClass cls = VehClass::Car;
  int occupants = 1;
  double front_m = 0.0;  // front bumper, measured from the upstream lane end
  double speed_mps = 0.0;
  double accel_mps2 = 0.0;
  double length_m = 5.0;
  std::vector<RouteHop> route;
  int hop = 0;
  long long entry_s = 0;
  double delayed_s = 0.0;
  double route_len_m = 0.0;

  double speed_kmh() const { return speed_mps * 3.6; }
  double rear_m() const { return front_m - length_m; }
};

struct Lane {
  std::vector<Vehicle> veh;  // index 0 is closest to the stop line
};

struct Link {
  int intersection = 0;
  Approach approach = Approach::West;
  double length_m = 0.0;
  std::vector<Lane> lanes;
};

struct SignalInterval {
  Phase phase = Phase::A;
  IntervalKind kind = IntervalKind::Green;
  int len_s = 0;
};

// Maps a movement to the phase that serves it: corridor through/left -> A,
// corridor right -> B, side-street through/left -> C, side-street right -> D.
Phase phase_for(Approach ap, Movement mv);

// Pedestrian zones 0..3 cross the side arms and walk with phase A greens;
// zones 4..7 cross the corridor and walk with phase C greens.
Phase ped_zone_phase(int zone);

class SignalController {
 public:
  // adaptive controller: consumes SignalPlans, pauses at half-cycle ends
  void init_adaptive(int intersection, const FixedTimings& timings);
  // fixed-time controller: repeats the schedule forever, starting offset_s in
  void init_fixed(const FixedSchedule& sched);

  bool adaptive() const { return adaptive_; }
  bool at_decision_boundary() const {
    return adaptive_ && queue_.empty() && remaining_ == 0;
  }
  std::array<Phase, 2> next_phase_pair() const;
  void apply_plan(const SignalPlan& plan);
  void tick();

  int intersection() const { return intersection_; }
  Phase phase() const { return phase_; }
  IntervalKind kind() const { return kind_; }
  int remaining_s() const { return remaining_; }

  SignalColor color(Approach ap, Movement mv) const;
  bool ped_zone_served(int zone) const;

 private:
  void load(const SignalInterval& iv);

  int intersection_ = 0;
  bool adaptive_ = true;
  Phase phase_ = Phase::A;
  IntervalKind kind_ = IntervalKind::Green;
  int remaining_ = 0;
  bool pair_cd_next_ = false;
  FixedTimings timings_;
  std::deque<SignalInterval> queue_;  // upcoming intervals, current excluded
  std::vector<SignalInterval> cycle_;
  size_t cycle_idx_ = 0;
};

struct PedZoneState {
  std::deque<long long> waiting;  // arrival timestamps, FIFO
  double service_credit = 0.0;    // fractional capacity carried between steps
};

struct EntryQueueState {
  std::deque<Vehicle> waiting;  // spawned but not yet admitted to the network
};

struct StepTraceRow {
  long long t = 0;
  int intersection = 0;
  Phase phase = Phase::A;
  IntervalKind kind = IntervalKind::Green;
};

struct DelayGridCell {
  long long t = 0;
  int intersection = 0;
  int approach = 0;
  int lane = 0;
  int cell = 0;  // 0 = nearest the stop line
  int count = 0;
};

struct CorridorState {
  long long clock_s = 0;
  std::vector<Link> links;  // link_index(i, approach)
  std::vector<SignalController> controllers;
  std::vector<std::vector<PedZoneState>> ped_zones;  // [intersection][zone]
  std::vector<EntryQueueState> entries;              // per origin id
  long long spawned_vehicles = 0;
  long long exited_vehicles = 0;
  long long spawned_pedestrians = 0;
  long long served_pedestrians = 0;
  double person_demand = 0.0;  // occupants + pedestrians spawned so far
  std::vector<TripRecord> trips;
  std::vector<StepTraceRow> signal_trace;

  int link_index(int intersection, Approach ap) const {
    return intersection * 4 + static_cast<int>(ap);
  }
  const Link& link(int intersection, Approach ap) const {
    return links[link_index(intersection, ap)];
  }
  long long in_network() const;
  long long held_at_entry() const;
  long long ped_queue(int intersection, int zone) const {
    return static_cast<long long>(ped_zones[intersection][zone].waiting.size());
  }
};

struct CfParams {
  double v_max_mps = 50.0 / 3.6;
  double accel = 2.5;
  double decel = 4.0;
  double comfort_decel = 3.0;
  double dt = 1.0;
};

struct CfResult {
  double speed_mps = 0.0;
  double accel_mps2 = 0.0;
  double displacement_m = 0.0;
};

// One car-following update. lead_gap_m is the largest displacement that keeps
// min_gap to the (already moved) leader, +inf when the lane ahead is clear;
// dist_to_line_m is the stop-line distance for the lane head, +inf otherwise.
// Red is a hard wall; amber stops the vehicle only if comfort_decel suffices.
CfResult car_following_update(double speed_mps, double lead_gap_m,
                              double dist_to_line_m, SignalColor line,
                              const CfParams& p);

// Origin ids: 0 = W, 1 = E, 2+2i = N_i, 3+2i = S_i.
int origin_id(const std::string& zone, int num_intersections);
int num_origins(int num_intersections);

// Hourly demand routed onto (intersection, phase) critical flow ratios for
// Webster timing; saturation flow defaults to 1900 veh/h/lane.
std::vector<PhaseRatios> assign_phase_ratios(const CorridorConfig& cfg,
                                             const DemandConfig& demand,
                                             double saturation_veh_h_lane = 1900.0);

class Simulator {
 public:
  Simulator(CorridorConfig cfg, DemandConfig demand, uint64_t seed,
            FixedTimings timings = {});

  // switches every controller to a fixed-time schedule (FS-WF / FS-GW)
  void set_fixed_schedules(const std::vector<FixedSchedule>& schedules);

  bool at_decision_boundary() const;
  std::array<Phase, 2> next_phase_pair(int intersection) const;
  void apply_plans(const std::vector<SignalPlan>& plans);

  // advances one sim_step and returns the post-step delay snapshot
  DelaySnapshot step();

  const CorridorState& state() const { return state_; }
  const CorridorConfig& config() const { return cfg_; }
  const DemandConfig& demand() const { return demand_; }
  long long clock() const { return state_.clock_s; }

  std::vector<DelayGridCell> delay_grid() const;

  // default plan applied when an adaptive controller hits a boundary and no
  // policy supplies one: even split over a feasible half cycle
  SignalPlan default_plan(int intersection) const;

 private:
  void spawn_demand();
  void move_vehicles();
  void resolve_transfers();
  void admit_entries();
  void serve_pedestrians();
  DelaySnapshot take_snapshot() const;
  int pick_lane(const Link& link, Movement next_move) const;
  bool try_insert(Link& link, Vehicle v, double carry_m);
  void complete_trip(const Vehicle& v);
  double route_length(const std::vector<RouteHop>& route) const;

  CorridorConfig cfg_;
  DemandConfig demand_;
  FixedTimings timings_;
  Rng rng_;
  CorridorState state_;
  CfParams cf_;
  long long next_vehicle_id_ = 1;
  std::vector<std::vector<RouteHop>> flow_routes_;
  std::vector<int> flow_origins_;
  std::vector<double> flow_route_len_;
};

}  // namespace corridor
