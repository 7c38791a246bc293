#include "corridor/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace corridor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ZoneRef {
  enum Kind { WEnd, EEnd, North, South } kind;
  int i = -1;
};

ZoneRef parse_zone(const std::string& z, int a) {
  if (z == "W") return {ZoneRef::WEnd, -1};
  if (z == "E") return {ZoneRef::EEnd, -1};
  if (z.size() >= 2 && (z[0] == 'N' || z[0] == 'S')) {
    int i;
    try {
      i = std::stoi(z.substr(1));
    } catch (...) {
      throw ConfigError("demand.vehicle_flows", "bad zone '" + z + "'");
    }
    if (i < 0 || i >= a)
      throw ConfigError("demand.vehicle_flows",
                        "zone '" + z + "' out of range for " + std::to_string(a) +
                            " intersections");
    return {z[0] == 'N' ? ZoneRef::North : ZoneRef::South, i};
  }
  throw ConfigError("demand.vehicle_flows", "bad zone '" + z + "'");
}

void east_throughs(std::vector<RouteHop>& r, int from, int to) {
  for (int i = from; i <= to; ++i) r.push_back({i, Approach::West, Movement::Through});
}

void west_throughs(std::vector<RouteHop>& r, int from, int to) {
  for (int i = from; i >= to; --i) r.push_back({i, Approach::East, Movement::Through});
}

}  // namespace

std::vector<RouteHop> build_route(const std::string& from, const std::string& to,
                                  int a) {
  const ZoneRef f = parse_zone(from, a);
  const ZoneRef t = parse_zone(to, a);
  if (from == to)
    throw ConfigError("demand.vehicle_flows", "origin equals destination (" + from + ")");

  std::vector<RouteHop> r;
  switch (f.kind) {
    case ZoneRef::WEnd:
      if (t.kind == ZoneRef::WEnd) break;  // falls through to the error below
      if (t.kind == ZoneRef::EEnd) {
        east_throughs(r, 0, a - 1);
      } else {
        east_throughs(r, 0, t.i - 1);
        r.push_back({t.i, Approach::West,
                     t.kind == ZoneRef::North ? Movement::Left : Movement::Right});
      }
      break;
    case ZoneRef::EEnd:
      if (t.kind == ZoneRef::EEnd) break;
      if (t.kind == ZoneRef::WEnd) {
        west_throughs(r, a - 1, 0);
      } else {
        west_throughs(r, a - 1, t.i + 1);
        r.push_back({t.i, Approach::East,
                     t.kind == ZoneRef::South ? Movement::Left : Movement::Right});
      }
      break;
    case ZoneRef::North:
      if (t.kind == ZoneRef::South && t.i == f.i) {
        r.push_back({f.i, Approach::North, Movement::Through});
      } else if (t.kind == ZoneRef::EEnd) {
        r.push_back({f.i, Approach::North, Movement::Left});
        east_throughs(r, f.i + 1, a - 1);
      } else if (t.kind == ZoneRef::WEnd) {
        r.push_back({f.i, Approach::North, Movement::Right});
        west_throughs(r, f.i - 1, 0);
      } else if (t.i > f.i) {
        r.push_back({f.i, Approach::North, Movement::Left});
        east_throughs(r, f.i + 1, t.i - 1);
        r.push_back({t.i, Approach::West,
                     t.kind == ZoneRef::North ? Movement::Left : Movement::Right});
      } else if (t.i < f.i) {
        r.push_back({f.i, Approach::North, Movement::Right});
        west_throughs(r, f.i - 1, t.i + 1);
        r.push_back({t.i, Approach::East,
                     t.kind == ZoneRef::South ? Movement::Left : Movement::Right});
      }
      break;
    case ZoneRef::South:
      if (t.kind == ZoneRef::North && t.i == f.i) {
        r.push_back({f.i, Approach::South, Movement::Through});
      } else if (t.kind == ZoneRef::EEnd) {
        r.push_back({f.i, Approach::South, Movement::Right});
        east_throughs(r, f.i + 1, a - 1);
      } else if (t.kind == ZoneRef::WEnd) {
        r.push_back({f.i, Approach::South, Movement::Left});
        west_throughs(r, f.i - 1, 0);
      } else if (t.i > f.i) {
        r.push_back({f.i, Approach::South, Movement::Right});
        east_throughs(r, f.i + 1, t.i - 1);
        r.push_back({t.i, Approach::West,
                     t.kind == ZoneRef::North ? Movement::Left : Movement::Right});
      } else if (t.i < f.i) {
        r.push_back({f.i, Approach::South, Movement::Left});
        west_throughs(r, f.i - 1, t.i + 1);
        r.push_back({t.i, Approach::East,
                     t.kind == ZoneRef::South ? Movement::Left : Movement::Right});
      }
      break;
  }
  if (r.empty())
    throw ConfigError("demand.vehicle_flows",
                      "no route from " + from + " to " + to);
  return r;
}

Phase phase_for(Approach ap, Movement mv) {
  const bool corridor_dir = ap == Approach::West || ap == Approach::East;
  if (mv == Movement::Right) return corridor_dir ? Phase::B : Phase::D;
  return corridor_dir ? Phase::A : Phase::C;
}

Phase ped_zone_phase(int zone) { return zone < 4 ? Phase::A : Phase::C; }

int origin_id(const std::string& zone, int a) {
  const ZoneRef z = parse_zone(zone, a);
  switch (z.kind) {
    case ZoneRef::WEnd: return 0;
    case ZoneRef::EEnd: return 1;
    case ZoneRef::North: return 2 + 2 * z.i;
    default: return 3 + 2 * z.i;
  }
}

int num_origins(int a) { return 2 + 2 * a; }

// ---------------------------------------------------------------------------
// SignalController

void SignalController::init_adaptive(int intersection, const FixedTimings& timings) {
  intersection_ = intersection;
  adaptive_ = true;
  phase_ = Phase::A;
  kind_ = IntervalKind::Green;
  remaining_ = 0;
  pair_cd_next_ = false;
  timings_ = timings;
  queue_.clear();
  cycle_.clear();
}

void SignalController::init_fixed(const FixedSchedule& sched) {
  intersection_ = sched.intersection;
  adaptive_ = false;
  queue_.clear();
  cycle_.clear();
  for (int p = 0; p < 4; ++p) {
    const Phase ph = static_cast<Phase>(p);
    cycle_.push_back({ph, IntervalKind::Green, sched.greens[p]});
    cycle_.push_back({ph, IntervalKind::Amber, sched.timings.amber_s});
    cycle_.push_back({ph, IntervalKind::AllRed, sched.timings.all_red_s});
  }
  const int cycle_s = sched.cycle_s();
  // schedule(t) = base(t - offset): position the controller mid-cycle
  int off = static_cast<int>(std::llround(sched.offset_s)) % cycle_s;
  if (off < 0) off += cycle_s;
  int pos = (cycle_s - off) % cycle_s;
  cycle_idx_ = 0;
  while (pos >= cycle_[cycle_idx_].len_s) {
    pos -= cycle_[cycle_idx_].len_s;
    ++cycle_idx_;
  }
  phase_ = cycle_[cycle_idx_].phase;
  kind_ = cycle_[cycle_idx_].kind;
  remaining_ = cycle_[cycle_idx_].len_s - pos;
}

std::array<Phase, 2> SignalController::next_phase_pair() const {
  return pair_cd_next_ ? std::array<Phase, 2>{Phase::C, Phase::D}
                       : std::array<Phase, 2>{Phase::A, Phase::B};
}

void SignalController::load(const SignalInterval& iv) {
  phase_ = iv.phase;
  kind_ = iv.kind;
  remaining_ = iv.len_s;
}

void SignalController::apply_plan(const SignalPlan& plan) {
  if (!at_decision_boundary())
    throw std::logic_error("apply_plan: controller not at a decision boundary");
  if (plan.total != plan.green_1 + plan.green_2 + 2 * timings_.intergreen_s())
    throw std::logic_error("apply_plan: plan does not match controller timings");
  const Phase p1 = plan.phase_pair[0];
  const Phase p2 = plan.phase_pair[1];
  queue_.push_back({p1, IntervalKind::Green, plan.green_1});
  queue_.push_back({p1, IntervalKind::Amber, timings_.amber_s});
  queue_.push_back({p1, IntervalKind::AllRed, timings_.all_red_s});
  queue_.push_back({p2, IntervalKind::Green, plan.green_2});
  queue_.push_back({p2, IntervalKind::Amber, timings_.amber_s});
  queue_.push_back({p2, IntervalKind::AllRed, timings_.all_red_s});
  pair_cd_next_ = (p1 == Phase::A);
  load(queue_.front());
  queue_.pop_front();
}

void SignalController::tick() {
  if (remaining_ > 0) --remaining_;
  if (remaining_ > 0) return;
  if (adaptive_) {
    if (!queue_.empty()) {
      load(queue_.front());
      queue_.pop_front();
    }
    // queue exhausted: hold the last interval's display until the next plan
  } else {
    cycle_idx_ = (cycle_idx_ + 1) % cycle_.size();
    load(cycle_[cycle_idx_]);
  }
}

SignalColor SignalController::color(Approach ap, Movement mv) const {
  if (kind_ == IntervalKind::AllRed) return SignalColor::Red;
  if (phase_ != phase_for(ap, mv)) return SignalColor::Red;
  return kind_ == IntervalKind::Green ? SignalColor::Green : SignalColor::Amber;
}

bool SignalController::ped_zone_served(int zone) const {
  return kind_ == IntervalKind::Green && phase_ == ped_zone_phase(zone);
}

// ---------------------------------------------------------------------------
// car following

CfResult car_following_update(double v, double lead_gap_m, double dist_to_line_m,
                              SignalColor line, const CfParams& p) {
  double allowed = std::max(0.0, lead_gap_m);
  bool line_binds = false;
  if (line == SignalColor::Red) {
    line_binds = true;
  } else if (line == SignalColor::Amber) {
    // stop only if a comfortable deceleration still reaches the line
    line_binds = v * v / (2.0 * p.comfort_decel) <= dist_to_line_m;
  }
  if (line_binds) allowed = std::min(allowed, std::max(0.0, dist_to_line_m));

  const double v_des = std::min(v + p.accel * p.dt, p.v_max_mps);
  // largest speed that can still stop within `allowed` at full braking
  const double bd = p.decel * p.dt;
  const double v_safe = std::isinf(allowed)
                            ? kInf
                            : -bd + std::sqrt(bd * bd + 2.0 * p.decel * allowed);
  CfResult r;
  r.speed_mps = std::max(0.0, std::min(v_des, v_safe));
  r.displacement_m = r.speed_mps * p.dt;
  r.accel_mps2 = (r.speed_mps - v) / p.dt;
  return r;
}

// ---------------------------------------------------------------------------
// demand -> Webster flow ratios

std::vector<PhaseRatios> assign_phase_ratios(const CorridorConfig& cfg,
                                             const DemandConfig& demand,
                                             double saturation_veh_h_lane) {
  const int a = cfg.num_intersections;
  // volume per (intersection, approach, through+left | right)
  std::vector<std::array<std::array<double, 2>, 4>> vol(
      a, {{{0, 0}, {0, 0}, {0, 0}, {0, 0}}});
  for (const auto& f : demand.vehicle_flows) {
    const auto route = build_route(f.from, f.to, a);
    for (const auto& hop : route) {
      const int g = hop.move == Movement::Right ? 1 : 0;
      vol[hop.intersection][static_cast<int>(hop.approach)][g] += f.rate_veh_h;
    }
  }
  const int tl_lanes = cfg.lanes_per_approach > 1 ? cfg.lanes_per_approach - 1 : 1;
  const int right_lanes = 1;
  std::vector<PhaseRatios> out(a, PhaseRatios{0, 0, 0, 0});
  for (int i = 0; i < a; ++i) {
    auto ratio = [&](Approach ap, int g) {
      const int lanes = g == 0 ? tl_lanes : right_lanes;
      return vol[i][static_cast<int>(ap)][g] / (saturation_veh_h_lane * lanes);
    };
    out[i][0] = std::max(ratio(Approach::West, 0), ratio(Approach::East, 0));
    out[i][1] = std::max(ratio(Approach::West, 1), ratio(Approach::East, 1));
    out[i][2] = std::max(ratio(Approach::North, 0), ratio(Approach::South, 0));
    out[i][3] = std::max(ratio(Approach::North, 1), ratio(Approach::South, 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CorridorState helpers

long long CorridorState::in_network() const {
  long long n = 0;
  for (const auto& link : links)
    for (const auto& lane : link.lanes) n += static_cast<long long>(lane.veh.size());
  return n;
}

long long CorridorState::held_at_entry() const {
  long long n = 0;
  for (const auto& e : entries) n += static_cast<long long>(e.waiting.size());
  return n;
}

// ---------------------------------------------------------------------------
// Simulator

Simulator::Simulator(CorridorConfig cfg, DemandConfig demand, uint64_t seed,
                     FixedTimings timings)
    : cfg_(std::move(cfg)),
      demand_(std::move(demand)),
      timings_(timings),
      rng_(seed) {
  cfg_.validate();
  demand_.validate(cfg_);
  timings_.validate();

  cf_.v_max_mps = cfg_.design_speed_mps();
  cf_.accel = cfg_.accel_mps2;
  cf_.decel = cfg_.decel_mps2;
  cf_.comfort_decel = cfg_.comfort_decel_mps2;
  cf_.dt = cfg_.sim_step_s;

  const int a = cfg_.num_intersections;
  state_.links.resize(a * 4);
  for (int i = 0; i < a; ++i) {
    for (int ap = 0; ap < 4; ++ap) {
      Link& link = state_.links[state_.link_index(i, static_cast<Approach>(ap))];
      link.intersection = i;
      link.approach = static_cast<Approach>(ap);
      link.length_m = cfg_.link_length(i, static_cast<Approach>(ap));
      link.lanes.resize(cfg_.lanes_per_approach);
    }
  }
  state_.controllers.resize(a);
  for (int i = 0; i < a; ++i) state_.controllers[i].init_adaptive(i, timings_);
  state_.ped_zones.assign(a, std::vector<PedZoneState>(cfg_.ped_zones_per_intersection));
  state_.entries.resize(num_origins(a));

  // resolve all routes up front so bad ODs fail at construction
  for (const auto& f : demand_.vehicle_flows) {
    flow_routes_.push_back(build_route(f.from, f.to, a));
    flow_origins_.push_back(origin_id(f.from, a));
    flow_route_len_.push_back(route_length(flow_routes_.back()));
  }
}

void Simulator::set_fixed_schedules(const std::vector<FixedSchedule>& schedules) {
  for (const auto& s : schedules) state_.controllers.at(s.intersection).init_fixed(s);
}

bool Simulator::at_decision_boundary() const {
  for (const auto& c : state_.controllers)
    if (!c.at_decision_boundary()) return false;
  return true;
}

std::array<Phase, 2> Simulator::next_phase_pair(int intersection) const {
  return state_.controllers.at(intersection).next_phase_pair();
}

void Simulator::apply_plans(const std::vector<SignalPlan>& plans) {
  for (const auto& p : plans) state_.controllers.at(p.intersection).apply_plan(p);
}

SignalPlan Simulator::default_plan(int intersection) const {
  const int total =
      std::max(50, 2 * timings_.min_green_s + 2 * timings_.intergreen_s());
  SignalPlan plan = decode_plan(0.5, total, timings_);
  plan.intersection = intersection;
  plan.phase_pair = state_.controllers[intersection].next_phase_pair();
  return plan;
}

double Simulator::route_length(const std::vector<RouteHop>& route) const {
  double len = 0.0;
  for (const auto& hop : route) len += cfg_.link_length(hop.intersection, hop.approach);
  return len;
}

void Simulator::spawn_demand() {
  const double dt_h = cfg_.sim_step_s / 3600.0;
  for (size_t fi = 0; fi < demand_.vehicle_flows.size(); ++fi) {
    const auto& f = demand_.vehicle_flows[fi];
    const int n = rng_.poisson(f.rate_veh_h * dt_h);
    for (int k = 0; k < n; ++k) {
      Vehicle v;
      v.id = next_vehicle_id_++;
      v.cls = rng_.uniform01() < f.bus_share ? VehClass::Bus : VehClass::Car;
      v.occupants = v.cls == VehClass::Bus ? demand_.bus_occupants.sample(rng_)
                                           : demand_.car_occupants.sample(rng_);
      v.length_m = v.cls == VehClass::Bus ? cfg_.bus_length_m : cfg_.car_length_m;
      v.route = flow_routes_[fi];
      v.route_len_m = flow_route_len_[fi];
      v.entry_s = state_.clock_s;
      ++state_.spawned_vehicles;
      state_.person_demand += v.occupants;
      state_.entries[flow_origins_[fi]].waiting.push_back(std::move(v));
    }
  }
  for (const auto& p : demand_.pedestrian_flows) {
    const int n = rng_.poisson(p.rate_ped_h * dt_h);
    for (int k = 0; k < n; ++k)
      state_.ped_zones[p.intersection][p.zone].waiting.push_back(state_.clock_s);
    state_.spawned_pedestrians += n;
    state_.person_demand += n;
  }
}

void Simulator::move_vehicles() {
  for (auto& link : state_.links) {
    const auto& ctrl = state_.controllers[link.intersection];
    for (auto& lane : link.lanes) {
      for (size_t k = 0; k < lane.veh.size(); ++k) {
        Vehicle& v = lane.veh[k];
        double lead_gap = kInf;
        if (k > 0) {
          const Vehicle& leader = lane.veh[k - 1];  // already moved this step
          lead_gap = leader.rear_m() - cfg_.min_gap_m - v.front_m;
        }
        double dist_line = kInf;
        SignalColor color = SignalColor::Green;
        if (k == 0) {
          dist_line = link.length_m - v.front_m;
          color = ctrl.color(link.approach, v.route[v.hop].move);
        }
        const CfResult r =
            car_following_update(v.speed_mps, lead_gap, dist_line, color, cf_);
        v.speed_mps = r.speed_mps;
        v.accel_mps2 = r.accel_mps2;
        v.front_m += r.displacement_m;
      }
    }
  }
}

int Simulator::pick_lane(const Link& link, Movement next_move) const {
  const int n = static_cast<int>(link.lanes.size());
  if (n == 1) return 0;
  if (next_move == Movement::Right) return 0;
  if (next_move == Movement::Left) return n - 1;
  int best = 1;
  for (int i = 2; i < n; ++i)
    if (link.lanes[i].veh.size() < link.lanes[best].veh.size()) best = i;
  return best;
}

bool Simulator::try_insert(Link& link, Vehicle v, double carry_m) {
  Lane& lane = link.lanes[pick_lane(link, v.route[v.hop].move)];
  double front = carry_m;
  if (!lane.veh.empty()) {
    const double max_front = lane.veh.back().rear_m() - cfg_.min_gap_m;
    front = std::min(front, max_front);
    if (front < 0.0) return false;
  }
  v.front_m = front;
  lane.veh.push_back(std::move(v));
  return true;
}

void Simulator::complete_trip(const Vehicle& v) {
  TripRecord t;
  t.mode = 'v';
  t.occupants = v.occupants;
  t.entry_s = static_cast<double>(v.entry_s);
  t.exit_s = static_cast<double>(state_.clock_s + 1);
  t.delay_s = v.delayed_s;
  t.delay_freeflow_s =
      std::max(0.0, (t.exit_s - t.entry_s) - v.route_len_m / cf_.v_max_mps);
  state_.trips.push_back(t);
  ++state_.exited_vehicles;
}

void Simulator::resolve_transfers() {
  for (auto& link : state_.links) {
    for (auto& lane : link.lanes) {
      while (!lane.veh.empty() && lane.veh.front().front_m > link.length_m) {
        Vehicle v = lane.veh.front();
        const double carry = v.front_m - link.length_m;
        v.hop += 1;
        if (v.hop == static_cast<int>(v.route.size())) {
          lane.veh.erase(lane.veh.begin());
          complete_trip(v);
          continue;
        }
        const auto& hop = v.route[v.hop];
        Link& target = state_.links[state_.link_index(hop.intersection, hop.approach)];
        if (try_insert(target, v, carry)) {
          lane.veh.erase(lane.veh.begin());
        } else {
          // downstream full: hold at the stop line
          lane.veh.front().front_m = link.length_m;
          lane.veh.front().speed_mps = 0.0;
          lane.veh.front().accel_mps2 = 0.0;
          break;
        }
      }
    }
  }
}

void Simulator::admit_entries() {
  for (auto& entry : state_.entries) {
    while (!entry.waiting.empty()) {
      Vehicle& head = entry.waiting.front();
      const auto& hop0 = head.route[0];
      Link& link = state_.links[state_.link_index(hop0.intersection, hop0.approach)];
      Lane& lane = link.lanes[pick_lane(link, hop0.move)];
      const double front = head.length_m;
      double run;
      if (lane.veh.empty()) {
        run = link.length_m - front;
      } else {
        run = lane.veh.back().rear_m() - cfg_.min_gap_m - front;
        if (run < 0.0) break;  // no room, keep holding (FIFO)
      }
      Vehicle v = std::move(head);
      entry.waiting.pop_front();
      v.front_m = front;
      const double bd = cf_.decel * cf_.dt;
      v.speed_mps = std::min(cf_.v_max_mps,
                             -bd + std::sqrt(bd * bd + 2.0 * cf_.decel *
                                                           std::max(0.0, run)));
      v.accel_mps2 = 0.0;
      lane.veh.push_back(std::move(v));
    }
  }
}

void Simulator::serve_pedestrians() {
  const long long now = state_.clock_s + 1;
  for (int i = 0; i < cfg_.num_intersections; ++i) {
    const auto& ctrl = state_.controllers[i];
    for (int z = 0; z < cfg_.ped_zones_per_intersection; ++z) {
      auto& zone = state_.ped_zones[i][z];
      if (!ctrl.ped_zone_served(z)) continue;
      if (zone.waiting.empty()) {
        zone.service_credit = 0.0;  // unused capacity does not bank
        continue;
      }
      zone.service_credit += cfg_.ped_service_rate_per_s * cfg_.sim_step_s;
      int servable = static_cast<int>(std::floor(zone.service_credit));
      while (servable-- > 0 && !zone.waiting.empty()) {
        zone.service_credit -= 1.0;
        const long long arrival = zone.waiting.front();
        zone.waiting.pop_front();
        TripRecord t;
        t.mode = 'p';
        t.occupants = 1;
        t.entry_s = static_cast<double>(arrival);
        t.exit_s = static_cast<double>(now);
        t.delay_s = static_cast<double>(now - arrival);
        t.delay_freeflow_s = t.delay_s;
        state_.trips.push_back(t);
        ++state_.served_pedestrians;
      }
    }
  }
}

DelaySnapshot Simulator::take_snapshot() const {
  DelaySnapshot s;
  s.t = state_.clock_s + 1;
  s.delayed_pedestrians.assign(cfg_.num_intersections, 0);
  for (const auto& link : state_.links)
    for (const auto& lane : link.lanes)
      for (const auto& v : lane.veh)
        if (is_vehicle_delayed(v.speed_kmh()))
          s.delayed_vehicle_occupants.push_back(v.occupants);
  for (const auto& entry : state_.entries)
    for (const auto& v : entry.waiting)
      s.delayed_vehicle_occupants.push_back(v.occupants);
  for (int i = 0; i < cfg_.num_intersections; ++i)
    for (const auto& zone : state_.ped_zones[i])
      s.delayed_pedestrians[i] += static_cast<long long>(zone.waiting.size());
  return s;
}

DelaySnapshot Simulator::step() {
  for (auto& c : state_.controllers)
    if (c.at_decision_boundary()) c.apply_plan(default_plan(c.intersection()));

  for (const auto& c : state_.controllers)
    state_.signal_trace.push_back(
        {state_.clock_s, c.intersection(), c.phase(), c.kind()});

  spawn_demand();
  move_vehicles();
  resolve_transfers();
  admit_entries();
  serve_pedestrians();

  DelaySnapshot snap = take_snapshot();
  const double dt = cfg_.sim_step_s;
  for (auto& link : state_.links)
    for (auto& lane : link.lanes)
      for (auto& v : lane.veh)
        if (is_vehicle_delayed(v.speed_kmh())) v.delayed_s += dt;
  for (auto& entry : state_.entries)
    for (auto& v : entry.waiting) v.delayed_s += dt;

  for (auto& c : state_.controllers) c.tick();
  state_.clock_s += 1;
  return snap;
}

std::vector<DelayGridCell> Simulator::delay_grid() const {
  std::vector<DelayGridCell> out;
  for (const auto& link : state_.links) {
    for (int li = 0; li < static_cast<int>(link.lanes.size()); ++li) {
      for (const auto& v : link.lanes[li].veh) {
        if (!is_vehicle_delayed(v.speed_kmh())) continue;
        const double dist = link.length_m - v.front_m;
        const int cell = static_cast<int>(std::floor(dist / cfg_.cell_length_m));
        if (cell < 0 || cell >= cfg_.cells_per_lane) continue;
        bool merged = false;
        for (auto& c : out) {
          if (c.intersection == link.intersection &&
              c.approach == static_cast<int>(link.approach) && c.lane == li &&
              c.cell == cell) {
            ++c.count;
            merged = true;
            break;
          }
        }
        if (!merged)
          out.push_back({state_.clock_s, link.intersection,
                         static_cast<int>(link.approach), li, cell, 1});
      }
    }
  }
  return out;
}

}  // namespace corridor
