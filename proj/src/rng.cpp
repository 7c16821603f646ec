#include "priosim/rng.hpp"

#include <cmath>

namespace priosim {

namespace {

uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(uint64_t seed, std::string_view stream_name) {
  uint64_t x = seed ^ (fnv1a(stream_name) * 0x9e3779b97f4a7c15ULL);
  for (auto& w : s_) w = splitmix64(x);
  // All-zero state is the one invalid xoshiro state; splitmix output makes
  // it astronomically unlikely, but guard anyway.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

uint64_t RngStream::next_u64() {
  uint64_t result = rotl(s_[1] * 5, 7) * 9;
  uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t RngStream::uniform_int(uint64_t n) {
  PSIM_CHECK(n > 0, "uniform_int: empty range");
  // Multiply-shift; bias is < 1/2^64, irrelevant at simulation scale.
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

uint64_t RngStream::uniform_between(uint64_t lo, uint64_t hi) {
  PSIM_CHECK(lo <= hi, "uniform_between: bad range");
  return lo + uniform_int(hi - lo + 1);
}

double RngStream::exponential(double lambda) {
  if (lambda <= 0.0)
    throw ConfigError("exponential: lambda must be positive");
  // Draw from (0, 1] so log() never sees zero.
  double u = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  return -std::log(u) / lambda;
}

}  // namespace priosim
