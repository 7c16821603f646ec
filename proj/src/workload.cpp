#include "priosim/workload.hpp"

#include <algorithm>
#include <cmath>

namespace priosim {

double load_to_rate(double load_fraction, double mean_size_bytes,
                    double capacity_bps) {
  if (load_fraction < 0.0 || mean_size_bytes <= 0.0 || capacity_bps <= 0.0)
    throw ConfigError("load_to_rate: inputs must be positive");
  if (load_fraction >= 1.0)
    throw ConfigError("load_to_rate: load >= 1 gives an unstable queue");
  return load_fraction * capacity_bps / (mean_size_bytes * 8.0);
}

namespace {

// Draws the next Poisson interarrival gap in integer ns (at least 1).
SimTime next_gap(RngStream& rng, double rate_per_sec) {
  double gap_s = rng.exponential(rate_per_sec);
  SimTime ns = static_cast<SimTime>(std::llround(gap_s * 1e9));
  return ns < 1 ? 1 : ns;
}

NodeId pick_other(RngStream& rng, uint32_t nodes, NodeId not_this) {
  NodeId v = static_cast<NodeId>(rng.uniform_int(nodes - 1));
  return v >= not_this ? v + 1 : v;
}

}  // namespace

Trace gen_das(const WorkloadTopo& topo, SimTime duration,
              const SizeDist& sizes, double load_per_class, uint64_t seed) {
  if (topo.nodes < 3)
    throw ConfigError("gen_das: need at least 3 nodes for distinct twins");
  if (duration <= 0) throw ConfigError("gen_das: duration must be positive");
  double rate =
      load_to_rate(load_per_class, sizes.mean_bytes(), topo.capacity_bps);
  RngStream iat(seed, "das.iat");
  RngStream szs(seed, "das.size");
  RngStream srcs(seed, "das.src");
  RngStream dsts(seed, "das.dst");

  Trace out;
  FlowId next_id = 0;
  SimTime t = next_gap(iat, rate);
  while (t < duration) {
    FlowSpec prim;
    prim.id = next_id++;
    prim.src = static_cast<NodeId>(srcs.uniform_int(topo.nodes));
    prim.dst = pick_other(dsts, topo.nodes, prim.src);
    prim.size_bytes = sizes.sample(szs);
    prim.priority_class = 0;
    prim.arrival_ns = t;

    FlowSpec twin = prim;
    twin.id = next_id++;
    twin.priority_class = 1;
    twin.twin_of = prim.id;
    // backup copy goes to a different server than the primary
    do {
      twin.dst = pick_other(dsts, topo.nodes, twin.src);
    } while (twin.dst == prim.dst);

    out.push_back(prim);
    out.push_back(twin);
    t += next_gap(iat, rate);
  }
  return out;
}

Trace gen_sjf(const WorkloadTopo& topo, SimTime duration,
              const SizeDist& sizes, double load, uint64_t seed,
              uint64_t long_threshold) {
  if (topo.nodes < 2) throw ConfigError("gen_sjf: need at least 2 nodes");
  if (duration <= 0) throw ConfigError("gen_sjf: duration must be positive");
  double rate = load_to_rate(load, sizes.mean_bytes(), topo.capacity_bps);
  RngStream iat(seed, "sjf.iat");
  RngStream szs(seed, "sjf.size");
  RngStream srcs(seed, "sjf.src");
  RngStream dsts(seed, "sjf.dst");

  Trace out;
  FlowId next_id = 0;
  SimTime t = next_gap(iat, rate);
  while (t < duration) {
    FlowSpec f;
    f.id = next_id++;
    f.src = static_cast<NodeId>(srcs.uniform_int(topo.nodes));
    f.dst = pick_other(dsts, topo.nodes, f.src);
    f.size_bytes = sizes.sample(szs);
    f.priority_class = f.size_bytes >= long_threshold ? 1 : 0;
    f.arrival_ns = t;
    out.push_back(f);
    t += next_gap(iat, rate);
  }
  return out;
}

Trace gen_onoff(const WorkloadTopo& topo, SimTime duration,
                const OnOffConfig& cfg, double hp_load,
                const SizeDist& lp_sizes, double lp_load, uint64_t seed) {
  if (cfg.workers < 2) throw ConfigError("gen_onoff: need >= 2 workers");
  if (cfg.workers + 1 > topo.nodes)
    throw ConfigError("gen_onoff: workers + server exceed node count");
  if (cfg.server >= topo.nodes)
    throw ConfigError("gen_onoff: server id out of range");
  if (hp_load <= 0.0 || hp_load > 1.0)
    throw ConfigError("gen_onoff: hp_load must be in (0, 1]");
  double agg_bits = double(cfg.workers) * double(cfg.update_bytes) * 8.0;
  SimTime period = static_cast<SimTime>(
      std::llround(agg_bits / (hp_load * topo.capacity_bps) * 1e9));
  if (period <= 0) throw ConfigError("gen_onoff: degenerate period");

  Trace out;
  FlowId next_id = 0;
  for (SimTime t = 0; t < duration; t += period) {
    for (uint32_t w = 0; w < cfg.workers; ++w) {
      NodeId src = w >= cfg.server ? w + 1 : w;  // skip the server slot
      FlowSpec f;
      f.id = next_id++;
      f.src = src;
      f.dst = cfg.server;
      f.size_bytes = cfg.update_bytes;
      f.priority_class = 0;
      f.arrival_ns = t;
      out.push_back(f);
    }
  }

  if (lp_load > 0.0) {
    double rate =
        load_to_rate(lp_load, lp_sizes.mean_bytes(), topo.capacity_bps);
    RngStream iat(seed, "onoff.lp.iat");
    RngStream szs(seed, "onoff.lp.size");
    RngStream srcs(seed, "onoff.lp.src");
    SimTime t = next_gap(iat, rate);
    while (t < duration) {
      FlowSpec f;
      f.id = next_id++;
      f.src = pick_other(srcs, topo.nodes, cfg.server);
      f.dst = cfg.server;  // shares the incast bottleneck
      f.size_bytes = lp_sizes.sample(szs);
      f.priority_class = 1;
      f.arrival_ns = t;
      out.push_back(f);
      t += next_gap(iat, rate);
    }
    // interleave the two processes into one arrival-ordered trace
    std::stable_sort(out.begin(), out.end(),
                     [](const FlowSpec& a, const FlowSpec& b) {
                       return a.arrival_ns < b.arrival_ns;
                     });
  }
  return out;
}

Trace gen_hybrid(const WorkloadTopo& topo, SimTime duration,
                 const SizeDist& sizes, double hp_load, double lp_load,
                 NodeId client, uint64_t seed) {
  if (topo.nodes < 2) throw ConfigError("gen_hybrid: need at least 2 nodes");
  if (client >= topo.nodes)
    throw ConfigError("gen_hybrid: client id out of range");
  if (hp_load + lp_load >= 1.0)
    throw ConfigError("gen_hybrid: aggregate load must stay below 1");

  Trace out;
  FlowId next_id = 0;
  double mean = sizes.mean_bytes();
  struct Proc {
    const char* iat_name;
    const char* src_name;
    const char* size_name;
    double load;
    uint8_t cls;
  };
  Proc procs[2] = {{"hybrid.hp.iat", "hybrid.hp.src", "hybrid.hp.size",
                    hp_load, 0},
                   {"hybrid.lp.iat", "hybrid.lp.src", "hybrid.lp.size",
                    lp_load, 1}};
  for (const Proc& pr : procs) {
    if (pr.load <= 0.0) continue;
    double rate = load_to_rate(pr.load, mean, topo.capacity_bps);
    RngStream iat(seed, pr.iat_name);
    RngStream srcs(seed, pr.src_name);
    RngStream szs(seed, pr.size_name);
    SimTime t = next_gap(iat, rate);
    while (t < duration) {
      FlowSpec f;
      f.id = next_id++;
      f.src = pick_other(srcs, topo.nodes, client);
      f.dst = client;
      f.size_bytes = sizes.sample(szs);
      f.priority_class = pr.cls;
      f.arrival_ns = t;
      out.push_back(f);
      t += next_gap(iat, rate);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FlowSpec& a, const FlowSpec& b) {
                     return a.arrival_ns < b.arrival_ns;
                   });
  return out;
}

}  // namespace priosim
