#pragma once

#include <array>
#include <cstdint>

namespace corridor {

// xoshiro256** with splitmix64 seeding. All distributions are hand-rolled so
// that a given seed produces the same sequence on every platform and library
// version; simulator reproducibility depends on this.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // [0, 1), 53-bit resolution
  double uniform01();

  // integer in [0, n), n >= 1
  int uniform_int(int n);

  // standard normal via Box-Muller (no cached spare, keeps state minimal)
  double normal();

  // Knuth multiplication for small means, recursive halving above 30
  int poisson(double mean);

  // independent substream; advances this stream by one draw
  Rng fork(uint64_t salt);

  std::array<uint64_t, 4> state() const { return {s_[0], s_[1], s_[2], s_[3]}; }
  void set_state(const std::array<uint64_t, 4>& s);

 private:
  uint64_t s_[4];
};

}  // namespace corridor
