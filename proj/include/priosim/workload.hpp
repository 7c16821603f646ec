#ifndef PRIOSIM_WORKLOAD_HPP
#define PRIOSIM_WORKLOAD_HPP

#include "priosim/flow_spec.hpp"
#include "priosim/size_dist.hpp"

namespace priosim {

// Aggregate Poisson arrival rate (flows/second) that offers `load_fraction`
// of `capacity_bps` given the mean flow size.
double load_to_rate(double load_fraction, double mean_size_bytes,
                    double capacity_bps);

struct WorkloadTopo {
  uint32_t nodes = 40;
  double capacity_bps = 10e9;
};

// Duplicate-aware scheduling: Poisson foreground requests (class 0), each
// cloned to a backup copy at class 1 with the same size and arrival but a
// different server. Per-class offered load equals `load_per_class`.
Trace gen_das(const WorkloadTopo& topo, SimTime duration,
              const SizeDist& sizes, double load_per_class, uint64_t seed);

// Size-based two-level priority: one Poisson process, flows at or above
// `long_threshold` bytes are demoted to class 1.
Trace gen_sjf(const WorkloadTopo& topo, SimTime duration,
              const SizeDist& sizes, double load, uint64_t seed,
              uint64_t long_threshold = 1'000'000);

struct OnOffConfig {
  uint32_t workers = 8;
  uint64_t update_bytes = 500'000;
  NodeId server = 0;
};

// Periodic synchronized incast into one server (class 0) over Poisson
// background storage flows sharing the server's downlink (class 1). The
// period follows from the target high-priority load:
//   period = workers x update_bytes x 8 / (hp_load x capacity).
Trace gen_onoff(const WorkloadTopo& topo, SimTime duration,
                const OnOffConfig& cfg, double hp_load,
                const SizeDist& lp_sizes, double lp_load, uint64_t seed);

// Two independent Poisson processes into one client node, one per class.
Trace gen_hybrid(const WorkloadTopo& topo, SimTime duration,
                 const SizeDist& sizes, double hp_load, double lp_load,
                 NodeId client, uint64_t seed);

}  // namespace priosim

#endif
