#ifndef PRIOSIM_RNG_HPP
#define PRIOSIM_RNG_HPP

#include <cstdint>
#include <string_view>

#include "priosim/common.hpp"

namespace priosim {

// Self-contained xoshiro256** stream, seeded from (seed, stream name).
// std::* distributions are implementation-defined, so all draws are done
// by hand here to keep traces identical everywhere.
class RngStream {
 public:
  RngStream(uint64_t seed, std::string_view stream_name);

  uint64_t next_u64();

  // [0, 1), 53-bit resolution.
  double uniform01();

  // Integer in [0, n); n > 0.
  uint64_t uniform_int(uint64_t n);

  // Integer in [lo, hi] inclusive.
  uint64_t uniform_between(uint64_t lo, uint64_t hi);

  // Exponential with mean 1/lambda; lambda > 0.
  double exponential(double lambda);

 private:
  uint64_t s_[4];
};

}  // namespace priosim

#endif
