#ifndef PRIOSIM_COMMON_HPP
#define PRIOSIM_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace priosim {

// Simulated time in integer nanoseconds. Integer ns keeps serialization
// delays exact (10Gbps x 1500B = 1200ns) and makes runs bit-reproducible.
using SimTime = int64_t;

constexpr SimTime kUsec = 1000;
constexpr SimTime kMsec = 1000 * kUsec;
constexpr SimTime kSec = 1000 * kMsec;

using FlowId = uint64_t;
using NodeId = uint32_t;

constexpr NodeId kInvalidNode = 0xffffffffu;

// Engine-contract violation: indicates a bug in the model, not bad input.
struct SimFault : std::logic_error {
  explicit SimFault(const std::string& what) : std::logic_error(what) {}
};

// Bad user input (config file, CLI argument, malformed CDF file, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

#define PSIM_CHECK(cond, msg)                      \
  do {                                             \
    if (!(cond)) throw ::priosim::SimFault(msg);   \
  } while (0)

}  // namespace priosim

#endif
