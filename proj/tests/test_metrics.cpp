#include <doctest.h>

#include <stdexcept>

#include "corridor/metrics.hpp"

using namespace corridor;

TEST_CASE("delay threshold is strict at 5 km/h") {
  CHECK(is_vehicle_delayed(4.9));
  CHECK_FALSE(is_vehicle_delayed(5.0));
  CHECK(is_vehicle_delayed(0.0));
  CHECK_FALSE(is_vehicle_delayed(5.1));
}

TEST_CASE("raising the threshold never shrinks the delayed set") {
  for (double v = 0.0; v < 20.0; v += 0.37) {
    if (is_vehicle_delayed(v, 5.0)) CHECK(is_vehicle_delayed(v, 8.0));
  }
}

TEST_CASE("reward counts delayed people negatively") {
  DelaySnapshot empty;
  empty.delayed_pedestrians = {0, 0, 0};
  CHECK(compute_reward(empty) == 0.0);

  DelaySnapshot s;
  s.delayed_vehicle_occupants = {1, 3};
  s.delayed_pedestrians = {4, 0, 0};
  CHECK(compute_reward(s) == -8.0);

  DelaySnapshot w;
  w.delayed_vehicle_occupants = {1};
  w.delayed_pedestrians = {1, 0, 0};
  CHECK(compute_reward(w, 2.0, 1.0) == -3.0);
}

TEST_CASE("metrics for a constant delay profile") {
  std::vector<DelaySnapshot> snaps(100);
  for (auto& s : snaps) {
    s.delayed_vehicle_occupants = {4, 3};  // 7 occupants in 2 vehicles
    s.delayed_pedestrians = {3};
  }
  std::vector<TripRecord> trips;
  auto r = accumulate_metrics(snaps, trips, 50.0);
  CHECK(r.aid == 1000.0);
  CHECK(r.pcd == 20.0);
  CHECK(r.pcd * r.demand == r.aid);
  CHECK(r.avds == 2.0);
  CHECK(r.apds == 3.0);
  CHECK(r.avds * r.horizon_s == 200.0);
  CHECK_FALSE(r.adv.has_value());   // no completed vehicle trips
  CHECK_FALSE(r.awtp.has_value());
}

TEST_CASE("trip log means") {
  std::vector<DelaySnapshot> snaps(10);
  for (auto& s : snaps) s.delayed_pedestrians = {0};
  std::vector<TripRecord> trips = {
      {'v', 2, 0, 100, 10.0, 8.0},
      {'v', 1, 0, 120, 30.0, 24.0},
      {'p', 1, 5, 25, 20.0, 20.0},
  };
  auto r = accumulate_metrics(snaps, trips, 5.0);
  REQUIRE(r.adv.has_value());
  CHECK(*r.adv == 20.0);
  CHECK(*r.adv_freeflow == 16.0);
  REQUIRE(r.awtp.has_value());
  CHECK(*r.awtp == 20.0);
  CHECK(r.n_vehicles == 2);
  CHECK(r.n_pedestrians == 1);
}

TEST_CASE("improvement reproduces the published FS-WF and FS-GW rows") {
  CHECK(improvement(1369020.65, 865874.70) == doctest::Approx(36.75).epsilon(0.0005));
  CHECK(improvement(1102796.65, 865874.70) == doctest::Approx(21.48).epsilon(0.0005));
  CHECK(improvement(123.0, 123.0) == 0.0);
  CHECK(improvement(100.0, 150.0) < 0.0);
  CHECK_THROWS_AS(improvement(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(improvement(-5.0, 1.0), std::domain_error);
}

TEST_CASE("published per-capita arithmetic is consistent") {
  // Table row: AID 1,369,020.65 at PCD 137.53 implies roughly 9,954 travelers
  const double d = 1369020.65 / 137.53;
  CHECK(d == doctest::Approx(9954.0).epsilon(0.001));
}

TEST_CASE("seed sweep statistics") {
  MetricsReport a;
  a.aid = 100;
  MetricsReport b = a;
  b.aid = 200;
  auto s = seed_sweep_stats({a, b});
  CHECK(s.aid.mean == 150.0);

  MetricsReport c = a;
  c.aid = 0;
  MetricsReport d = a;
  d.aid = 10;
  MetricsReport e = a;
  e.aid = 20;
  auto s2 = seed_sweep_stats({c, d, e});
  CHECK(s2.aid.mean == 10.0);
  CHECK(s2.aid.stddev == doctest::Approx(10.0));

  auto s3 = seed_sweep_stats({a, a, a});
  CHECK(s3.aid.stddev == 0.0);

  CHECK_THROWS_AS(seed_sweep_stats({a}), std::invalid_argument);
}

TEST_CASE("paired one-sided test direction") {
  std::vector<double> worse = {110, 120, 130, 140, 115, 125, 118, 122};
  std::vector<double> better = {100, 105, 118, 120, 104, 110, 100, 109};
  CHECK(paired_one_sided_p(worse, better) < 0.01);
  CHECK(paired_one_sided_p(better, worse) > 0.95);
  CHECK(paired_one_sided_p(worse, worse) == 0.5);
}
