#include <doctest.h>

#include <numeric>

#include "corridor/rng.hpp"
#include "corridor/signal.hpp"

using namespace corridor;

namespace {
const FixedTimings kT;  // 3 / 2 / 10
}

TEST_CASE("decode_plan reproduces the 15/26 split of a 51 s half cycle") {
  // budget 41, p1 = 0.36 -> 14.76 rounds to 15
  auto plan = decode_plan(0.36, 51, kT);
  CHECK(plan.green_1 == 15);
  CHECK(plan.green_2 == 26);
  CHECK(plan.total == 51);
}

TEST_CASE("decode_plan even split") {
  auto plan = decode_plan(0.5, 50, kT);
  CHECK(plan.green_1 == 20);
  CHECK(plan.green_2 == 20);
}

TEST_CASE("decode_plan clamps tiny splits to min green") {
  auto plan = decode_plan(0.02, 30, kT);  // raw green_1 = 0.4
  CHECK(plan.green_1 == 10);
  CHECK(plan.green_2 == 10);

  auto high = decode_plan(0.98, 30, kT);
  CHECK(high.green_1 == 10);
  CHECK(high.green_2 == 10);
}

TEST_CASE("decode_plan rejects infeasible durations") {
  CHECK_THROWS_AS(decode_plan(0.5, 29, kT), InfeasibleDurationError);
}

TEST_CASE("decode_plan is total and feasible over the whole action grid") {
  const auto spec = ActionSpaceSpec::defaults(3);
  int cases = 0;
  for (double p : spec.local_values) {
    for (int c : spec.global_values) {
      auto plan = decode_plan(p, c, kT);
      REQUIRE(plan.green_1 >= kT.min_green_s);
      REQUIRE(plan.green_2 >= kT.min_green_s);
      REQUIRE(plan.green_1 + plan.green_2 + 2 * kT.intergreen_s() == c);
      ++cases;
    }
  }
  CHECK(cases == 49 * 41);
}

TEST_CASE("decode_plan green_1 is monotone in p1") {
  for (int c : {30, 45, 51, 70}) {
    int prev = 0;
    for (int k = 1; k <= 49; ++k) {
      auto plan = decode_plan(0.02 * k, c, kT);
      REQUIRE(plan.green_1 >= prev);
      prev = plan.green_1;
    }
  }
}

TEST_CASE("webster formula hand cases") {
  CHECK(webster_cycle({0.25, 0.25}, 10.0) == doctest::Approx(40.0));  // (15+5)/0.5
  CHECK(webster_cycle_raw({0.9}, 16.0) == doctest::Approx(290.0));
  CHECK(webster_cycle({0.9}, 16.0) == doctest::Approx(150.0));  // upper clamp
  CHECK(webster_cycle({0.0}, 10.0) == doctest::Approx(30.0));   // 20 -> lower clamp
  CHECK(webster_cycle_raw({0.1, 0.1, 0.1, 0.1}, 20.0) ==
        doctest::Approx((1.5 * 20 + 5) / 0.6));
}

TEST_CASE("webster rejects oversaturation") {
  CHECK_THROWS_AS(webster_cycle({0.6, 0.5}, 10.0), OversaturationError);
}

TEST_CASE("webster is increasing in Y") {
  double prev = 0.0;
  for (double y = 0.1; y <= 0.9; y += 0.1) {
    double c = webster_cycle_raw({y}, 12.0);
    REQUIRE(c > prev);
    prev = c;
  }
}

TEST_CASE("green_split equal ratios") {
  auto g = green_split(100, {0.2, 0.2, 0.2, 0.2}, kT);
  CHECK(g == std::vector<int>{20, 20, 20, 20});
}

TEST_CASE("green_split proportional") {
  auto g = green_split(100, {0.3, 0.1, 0.3, 0.1}, kT);
  CHECK(g == std::vector<int>{30, 10, 30, 10});
}

TEST_CASE("green_split identity and min green over random ratios") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ratios(4);
    for (auto& r : ratios) r = rng.uniform01();
    const int cycle = 60 + rng.uniform_int(91);  // [60, 150]
    auto g = green_split(cycle, ratios, kT);
    int sum = std::accumulate(g.begin(), g.end(), 0);
    REQUIRE(sum + 4 * kT.intergreen_s() == cycle);
    for (int x : g) REQUIRE(x >= kT.min_green_s);
  }
}

TEST_CASE("green_split handles the all-minimum corner") {
  auto g = green_split(60, {0.9, 0.02, 0.04, 0.04}, kT);
  CHECK(g == std::vector<int>{10, 10, 10, 10});
}

TEST_CASE("green_split rejects infeasible cycles") {
  CHECK_THROWS_AS(green_split(59, {0.2, 0.2, 0.2, 0.2}, kT),
                  InfeasibleDurationError);
}

TEST_CASE("green wave offsets from distance and speed") {
  auto o1 = green_wave_offsets({300.0}, 50.0);
  REQUIRE(o1.size() == 2);
  CHECK(o1[0] == 0.0);
  CHECK(o1[1] == doctest::Approx(21.6));

  auto o2 = green_wave_offsets({}, 40.0);
  CHECK(o2 == std::vector<double>{0.0});

  auto o3 = green_wave_offsets({100.0, 100.0}, 36.0);
  REQUIRE(o3.size() == 3);
  CHECK(o3[1] == doctest::Approx(10.0));
  CHECK(o3[2] == doctest::Approx(20.0));
}

TEST_CASE("FS-GW with zero link lengths degenerates to FS-WF") {
  std::vector<PhaseRatios> ratios = {{0.2, 0.05, 0.15, 0.05},
                                     {0.3, 0.02, 0.1, 0.02},
                                     {0.25, 0.1, 0.2, 0.1}};
  auto wf = build_fs_wf(ratios, 16.0, kT);
  auto gw = build_fs_gw(ratios, 16.0, kT, {0.0, 0.0}, 50.0);
  REQUIRE(wf.size() == gw.size());
  for (size_t i = 0; i < wf.size(); ++i) {
    CHECK(wf[i].greens == gw[i].greens);
    CHECK(gw[i].offset_s == 0.0);
  }
}

TEST_CASE("FS-WF schedules are feasible and demand-ordered") {
  std::vector<PhaseRatios> ratios = {{0.4, 0.05, 0.1, 0.05}};
  auto wf = build_fs_wf(ratios, 16.0, kT);
  REQUIRE(wf.size() == 1);
  for (int g : wf[0].greens) CHECK(g >= kT.min_green_s);
  CHECK(wf[0].greens[0] > wf[0].greens[2]);  // heavier phase gets more green
  CHECK(wf[0].cycle_s() >= 60);
}
