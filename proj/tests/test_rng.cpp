#include <doctest.h>

#include <cmath>

#include "corridor/rng.hpp"

using namespace corridor;

TEST_CASE("equal seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniform01 stays in [0,1) with sane mean") {
  Rng rng(7);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("uniform_int covers the range") {
  Rng rng(3);
  int counts[5] = {0};
  for (int i = 0; i < 50000; ++i) counts[rng.uniform_int(5)]++;
  for (int c : counts) CHECK(c > 8000);
}

TEST_CASE("poisson matches its mean and variance") {
  Rng rng(11);
  for (double mean : {0.3, 1.0, 5.0, 40.0}) {
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      int k = rng.poisson(mean);
      sum += k;
      sq += static_cast<double>(k) * k;
    }
    const double m = sum / n;
    const double var = sq / n - m * m;
    CHECK(m == doctest::Approx(mean).epsilon(0.05));
    CHECK(var == doctest::Approx(mean).epsilon(0.1));
  }
  CHECK(rng.poisson(0.0) == 0);
  CHECK(rng.poisson(-1.0) == 0);
}

TEST_CASE("normal has zero mean unit variance") {
  Rng rng(5);
  double sum = 0, sq = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("state round-trips") {
  Rng rng(99);
  for (int i = 0; i < 10; ++i) rng.next_u64();
  auto s = rng.state();
  Rng other(0);
  other.set_state(s);
  for (int i = 0; i < 100; ++i) CHECK(rng.next_u64() == other.next_u64());
}

TEST_CASE("forked streams are independent of later parent draws") {
  Rng a(123);
  Rng f1 = a.fork(1);
  Rng b(123);
  Rng f2 = b.fork(1);
  for (int i = 0; i < 100; ++i) CHECK(f1.next_u64() == f2.next_u64());
}
