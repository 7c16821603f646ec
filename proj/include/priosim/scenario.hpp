#ifndef PRIOSIM_SCENARIO_HPP
#define PRIOSIM_SCENARIO_HPP

#include <string>
#include <vector>

#include "priosim/config_file.hpp"
#include "priosim/network.hpp"
#include "priosim/tcp.hpp"
#include "priosim/workload.hpp"

namespace priosim {

enum class TransportKind : uint8_t { kTcp, kNearOpt };
enum class WlKind : uint8_t { kDas, kSjf, kOnOff, kHybrid };

struct TransportChoice {
  TransportKind kind = TransportKind::kTcp;
  TcpConfig tcp;  // also carries mss/header defaults for the oracle
};

// Complete description of one experiment, loadable from a sectioned config
// file and serializable back in normalized form.
struct ScenarioConfig {
  std::string name = "scenario";

  // topology
  uint32_t nodes = 40;
  uint64_t link_rate_bps = 10'000'000'000ULL;
  SimTime link_prop_ns = 25 * kUsec;

  // fabric
  bool single_queue = false;  // everything through one FIFO class
  SchedKind sched = SchedKind::kStrictPriority;
  std::vector<uint32_t> wfq_weights{99, 1};
  uint64_t buffer_total_bytes = 196'608;
  std::vector<uint64_t> buffer_alloc_bytes{131'072, 65'536};
  // defaults to 30% of each class's allocation; only probes are ECN-capable
  std::vector<uint64_t> ecn_threshold_bytes{39'321, 19'660};

  // host egress
  uint64_t driver_cap_pkts = 100;
  uint64_t staging_cap_pkts = 1000;

  // transports by logical class
  TransportChoice transport[2];
  SimTime nearopt_check_ns = 200 * kUsec;

  // workload
  WlKind wl = WlKind::kOnOff;
  SimTime duration_ns = 2 * kSec;
  std::string size_kind = "uniform";  // uniform | fixed | cdf
  uint64_t mean_bytes = 1'048'576;
  uint64_t fixed_bytes = 128'000;
  std::string cdf_file;
  double load = 0.3;  // das per-class / sjf aggregate
  uint64_t long_threshold_bytes = 1'000'000;
  uint32_t workers = 8;
  uint64_t update_bytes = 500'000;
  NodeId server = 0;  // on-off sink / hybrid client
  double hp_load = 0.5;
  double lp_load = 0.2;

  // run
  SimTime drain_ns = 5 * kSec;
  uint64_t seed = 1;

  static ScenarioConfig from_file(const ConfigFile& cf);
  ConfigFile to_config_file() const;

  // All rule violations, empty when the config is runnable.
  std::vector<std::string> validate() const;

  size_t num_queue_classes() const { return single_queue ? 1 : 2; }
  NetConfig net_config() const;
  SizeDist make_size_dist() const;
  Trace make_trace(uint64_t seed_value) const;
  std::string transport_label(uint8_t cls) const;
};

}  // namespace priosim

#endif
