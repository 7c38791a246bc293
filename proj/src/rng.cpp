#include "corridor/rng.hpp"

#include <cmath>

namespace corridor {

namespace {

uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) {
  uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

void Rng::set_state(const std::array<uint64_t, 4>& s) {
  for (int i = 0; i < 4; ++i) s_[i] = s[i];
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                           static_cast<unsigned __int128>(n)) >>
                          64);
}

double Rng::normal() {
  double u1 = 1.0 - uniform01();  // (0, 1]
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean > 30.0) {
    // sum of independent Poissons is Poisson
    double half = mean * 0.5;
    return poisson(half) + poisson(mean - half);
  }
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01();
  } while (p > limit);
  return k - 1;
}

Rng Rng::fork(uint64_t salt) {
  uint64_t mix = next_u64() ^ (salt * 0x9e3779b97f4a7c15ULL);
  return Rng(mix);
}

}  // namespace corridor
