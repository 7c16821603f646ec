#include "priosim/scenario.hpp"

#include <sstream>

namespace priosim {

namespace {

std::string tsec(uint8_t cls) { return "transport." + std::to_string(cls); }

TransportChoice parse_transport(const ConfigFile& cf, const std::string& sec,
                                TransportChoice base) {
  TransportChoice t = base;
  std::string kind = cf.get_or(sec, "kind", "tcp");
  if (kind == "tcp")
    t.kind = TransportKind::kTcp;
  else if (kind == "nearopt")
    t.kind = TransportKind::kNearOpt;
  else
    throw ConfigError("[" + sec + "] kind: unknown transport `" + kind + "`");

  std::string cc = cf.get_or(sec, "cc", "cubic");
  if (cc == "cubic")
    t.tcp.cc = CcAlgo::kCubic;
  else if (cc == "newreno")
    t.tcp.cc = CcAlgo::kNewReno;
  else
    throw ConfigError("[" + sec + "] cc: unknown algorithm `" + cc + "`");

  std::string flavor = cf.get_or(sec, "flavor", "none");
  if (flavor == "none")
    t.tcp.flavor = LpFlavor::kNone;
  else if (flavor == "ledbat")
    t.tcp.flavor = LpFlavor::kLedbat;
  else if (flavor == "tcplp")
    t.tcp.flavor = LpFlavor::kTcpLp;
  else if (flavor == "freeze")
    t.tcp.flavor = LpFlavor::kFreeze;
  else
    throw ConfigError("[" + sec + "] flavor: unknown flavor `" + flavor + "`");

  t.tcp.sack = cf.get_bool_or(sec, "sack", t.tcp.sack);
  t.tcp.mss = uint32_t(cf.get_int_or(sec, "mss", t.tcp.mss));
  t.tcp.header_bytes =
      uint32_t(cf.get_int_or(sec, "header_bytes", t.tcp.header_bytes));
  t.tcp.ack_bytes = uint32_t(cf.get_int_or(sec, "ack_bytes", t.tcp.ack_bytes));
  t.tcp.iw_pkts = uint32_t(cf.get_int_or(sec, "iw_pkts", t.tcp.iw_pkts));
  t.tcp.rto_min = cf.get_int_or(sec, "rto_min_ns", t.tcp.rto_min);
  t.tcp.rto_max = cf.get_int_or(sec, "rto_max_ns", t.tcp.rto_max);
  t.tcp.rto_initial = cf.get_int_or(sec, "rto_initial_ns", t.tcp.rto_initial);
  t.tcp.sndbuf = uint64_t(cf.get_int_or(sec, "sndbuf", int64_t(t.tcp.sndbuf)));
  t.tcp.rcvbuf = uint64_t(cf.get_int_or(sec, "rcvbuf", int64_t(t.tcp.rcvbuf)));
  t.tcp.cubic_friendly =
      cf.get_bool_or(sec, "cubic_friendly", t.tcp.cubic_friendly);
  t.tcp.cubic_fast_conv =
      cf.get_bool_or(sec, "cubic_fast_conv", t.tcp.cubic_fast_conv);
  t.tcp.ledbat_target =
      cf.get_int_or(sec, "ledbat_target_ns", t.tcp.ledbat_target);
  t.tcp.ledbat_gain = cf.get_double_or(sec, "ledbat_gain", t.tcp.ledbat_gain);
  t.tcp.tcplp_delta = cf.get_double_or(sec, "tcplp_delta", t.tcp.tcplp_delta);
  t.tcp.probe_interval =
      cf.get_int_or(sec, "probe_interval_ns", t.tcp.probe_interval);
  t.tcp.probe_bytes =
      uint32_t(cf.get_int_or(sec, "probe_bytes", t.tcp.probe_bytes));
  return t;
}

void emit_transport(ConfigFile& cf, const std::string& sec,
                    const TransportChoice& t) {
  cf.set(sec, "kind", t.kind == TransportKind::kNearOpt ? "nearopt" : "tcp");
  cf.set(sec, "cc", t.tcp.cc == CcAlgo::kCubic ? "cubic" : "newreno");
  const char* flavor = "none";
  switch (t.tcp.flavor) {
    case LpFlavor::kLedbat: flavor = "ledbat"; break;
    case LpFlavor::kTcpLp: flavor = "tcplp"; break;
    case LpFlavor::kFreeze: flavor = "freeze"; break;
    default: break;
  }
  cf.set(sec, "flavor", flavor);
  cf.set(sec, "sack", t.tcp.sack ? "true" : "false");
  cf.set(sec, "mss", std::to_string(t.tcp.mss));
  cf.set(sec, "header_bytes", std::to_string(t.tcp.header_bytes));
  cf.set(sec, "ack_bytes", std::to_string(t.tcp.ack_bytes));
  cf.set(sec, "iw_pkts", std::to_string(t.tcp.iw_pkts));
  cf.set(sec, "rto_min_ns", std::to_string(t.tcp.rto_min));
  cf.set(sec, "rto_max_ns", std::to_string(t.tcp.rto_max));
  cf.set(sec, "rto_initial_ns", std::to_string(t.tcp.rto_initial));
  cf.set(sec, "sndbuf", std::to_string(t.tcp.sndbuf));
  cf.set(sec, "rcvbuf", std::to_string(t.tcp.rcvbuf));
  cf.set(sec, "cubic_friendly", t.tcp.cubic_friendly ? "true" : "false");
  cf.set(sec, "cubic_fast_conv", t.tcp.cubic_fast_conv ? "true" : "false");
  cf.set(sec, "ledbat_target_ns", std::to_string(t.tcp.ledbat_target));
  cf.set(sec, "ledbat_gain", std::to_string(t.tcp.ledbat_gain));
  cf.set(sec, "tcplp_delta", std::to_string(t.tcp.tcplp_delta));
  cf.set(sec, "probe_interval_ns", std::to_string(t.tcp.probe_interval));
  cf.set(sec, "probe_bytes", std::to_string(t.tcp.probe_bytes));
}

std::vector<uint64_t> parse_u64_list(const ConfigFile& cf,
                                     const std::string& sec,
                                     const std::string& key,
                                     std::vector<uint64_t> dflt) {
  auto toks = cf.get_list_or(sec, key);
  if (toks.empty()) return dflt;
  std::vector<uint64_t> out;
  for (auto& t : toks) {
    try {
      out.push_back(std::stoull(t));
    } catch (...) {
      throw ConfigError("[" + sec + "] " + key + ": not an integer: " + t);
    }
  }
  return out;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_file(const ConfigFile& cf) {
  ScenarioConfig sc;
  sc.name = cf.get_or("run", "scenario", sc.name);
  sc.seed = uint64_t(cf.get_int_or("run", "seed", int64_t(sc.seed)));
  sc.drain_ns = cf.get_int_or("run", "drain_ns", sc.drain_ns);

  sc.nodes = uint32_t(cf.get_int_or("topology", "nodes", sc.nodes));
  sc.link_rate_bps = uint64_t(
      cf.get_int_or("topology", "link_rate_bps", int64_t(sc.link_rate_bps)));
  sc.link_prop_ns =
      cf.get_int_or("topology", "link_prop_ns", sc.link_prop_ns);

  sc.single_queue = cf.get_bool_or("fabric", "single_queue", false);
  std::string sched = cf.get_or("fabric", "scheduler", "spq");
  if (sched == "spq")
    sc.sched = SchedKind::kStrictPriority;
  else if (sched == "wfq")
    sc.sched = SchedKind::kWeightedFair;
  else
    throw ConfigError("[fabric] scheduler: unknown `" + sched + "`");
  {
    auto w = parse_u64_list(cf, "fabric", "wfq_weights",
                            {sc.wfq_weights.begin(), sc.wfq_weights.end()});
    sc.wfq_weights.assign(w.begin(), w.end());
  }
  sc.buffer_total_bytes = uint64_t(cf.get_int_or(
      "fabric", "buffer_total_bytes", int64_t(sc.buffer_total_bytes)));
  sc.buffer_alloc_bytes =
      parse_u64_list(cf, "fabric", "buffer_alloc_bytes", sc.buffer_alloc_bytes);
  if (cf.has("fabric", "ecn_threshold_bytes")) {
    sc.ecn_threshold_bytes =
        parse_u64_list(cf, "fabric", "ecn_threshold_bytes", {});
  } else {
    // marking kicks in at 30% of whatever each class was allocated
    sc.ecn_threshold_bytes.clear();
    for (uint64_t b : sc.buffer_alloc_bytes)
      sc.ecn_threshold_bytes.push_back(b * 3 / 10);
  }

  sc.driver_cap_pkts =
      uint64_t(cf.get_int_or("host", "driver_cap_pkts", int64_t(sc.driver_cap_pkts)));
  sc.staging_cap_pkts = uint64_t(
      cf.get_int_or("host", "staging_cap_pkts", int64_t(sc.staging_cap_pkts)));

  sc.transport[0] = parse_transport(cf, tsec(0), sc.transport[0]);
  sc.transport[1] = parse_transport(cf, tsec(1), sc.transport[1]);
  sc.nearopt_check_ns =
      cf.get_int_or("run", "nearopt_check_ns", sc.nearopt_check_ns);

  std::string wl = cf.get_or("workload", "generator", "onoff");
  if (wl == "das")
    sc.wl = WlKind::kDas;
  else if (wl == "sjf")
    sc.wl = WlKind::kSjf;
  else if (wl == "onoff")
    sc.wl = WlKind::kOnOff;
  else if (wl == "hybrid")
    sc.wl = WlKind::kHybrid;
  else
    throw ConfigError("[workload] generator: unknown `" + wl + "`");
  sc.duration_ns = cf.get_int_or("workload", "duration_ns", sc.duration_ns);
  sc.size_kind = cf.get_or("workload", "size_dist", sc.size_kind);
  sc.mean_bytes =
      uint64_t(cf.get_int_or("workload", "mean_bytes", int64_t(sc.mean_bytes)));
  sc.fixed_bytes = uint64_t(
      cf.get_int_or("workload", "fixed_bytes", int64_t(sc.fixed_bytes)));
  sc.cdf_file = cf.get_or("workload", "cdf_file", sc.cdf_file);
  sc.load = cf.get_double_or("workload", "load", sc.load);
  sc.long_threshold_bytes = uint64_t(cf.get_int_or(
      "workload", "long_threshold_bytes", int64_t(sc.long_threshold_bytes)));
  sc.workers = uint32_t(cf.get_int_or("workload", "workers", sc.workers));
  sc.update_bytes = uint64_t(
      cf.get_int_or("workload", "update_bytes", int64_t(sc.update_bytes)));
  sc.server = NodeId(cf.get_int_or("workload", "server", sc.server));
  sc.hp_load = cf.get_double_or("workload", "hp_load", sc.hp_load);
  sc.lp_load = cf.get_double_or("workload", "lp_load", sc.lp_load);
  return sc;
}

ConfigFile ScenarioConfig::to_config_file() const {
  ConfigFile cf;
  cf.set("run", "scenario", name);
  cf.set("run", "seed", std::to_string(seed));
  cf.set("run", "drain_ns", std::to_string(drain_ns));
  cf.set("run", "nearopt_check_ns", std::to_string(nearopt_check_ns));

  cf.set("topology", "nodes", std::to_string(nodes));
  cf.set("topology", "link_rate_bps", std::to_string(link_rate_bps));
  cf.set("topology", "link_prop_ns", std::to_string(link_prop_ns));

  cf.set("fabric", "single_queue", single_queue ? "true" : "false");
  cf.set("fabric", "scheduler",
         sched == SchedKind::kWeightedFair ? "wfq" : "spq");
  {
    std::ostringstream w;
    for (size_t i = 0; i < wfq_weights.size(); ++i)
      w << (i ? " " : "") << wfq_weights[i];
    cf.set("fabric", "wfq_weights", w.str());
  }
  cf.set("fabric", "buffer_total_bytes", std::to_string(buffer_total_bytes));
  {
    std::ostringstream a;
    for (size_t i = 0; i < buffer_alloc_bytes.size(); ++i)
      a << (i ? " " : "") << buffer_alloc_bytes[i];
    cf.set("fabric", "buffer_alloc_bytes", a.str());
  }
  {
    std::ostringstream e;
    for (size_t i = 0; i < ecn_threshold_bytes.size(); ++i)
      e << (i ? " " : "") << ecn_threshold_bytes[i];
    cf.set("fabric", "ecn_threshold_bytes", e.str());
  }

  cf.set("host", "driver_cap_pkts", std::to_string(driver_cap_pkts));
  cf.set("host", "staging_cap_pkts", std::to_string(staging_cap_pkts));

  emit_transport(cf, tsec(0), transport[0]);
  emit_transport(cf, tsec(1), transport[1]);

  const char* wls = "onoff";
  switch (wl) {
    case WlKind::kDas: wls = "das"; break;
    case WlKind::kSjf: wls = "sjf"; break;
    case WlKind::kOnOff: wls = "onoff"; break;
    case WlKind::kHybrid: wls = "hybrid"; break;
  }
  cf.set("workload", "generator", wls);
  cf.set("workload", "duration_ns", std::to_string(duration_ns));
  cf.set("workload", "size_dist", size_kind);
  cf.set("workload", "mean_bytes", std::to_string(mean_bytes));
  cf.set("workload", "fixed_bytes", std::to_string(fixed_bytes));
  if (!cdf_file.empty()) cf.set("workload", "cdf_file", cdf_file);
  cf.set("workload", "load", std::to_string(load));
  cf.set("workload", "long_threshold_bytes",
         std::to_string(long_threshold_bytes));
  cf.set("workload", "workers", std::to_string(workers));
  cf.set("workload", "update_bytes", std::to_string(update_bytes));
  cf.set("workload", "server", std::to_string(server));
  cf.set("workload", "hp_load", std::to_string(hp_load));
  cf.set("workload", "lp_load", std::to_string(lp_load));
  return cf;
}

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> v;
  if (nodes < 2) v.push_back("[topology] nodes: need at least 2");
  if (link_rate_bps == 0) v.push_back("[topology] link_rate_bps: zero");
  if (link_prop_ns <= 0) v.push_back("[topology] link_prop_ns: must be > 0");
  if (duration_ns <= 0) v.push_back("[workload] duration_ns: must be > 0");
  if (drain_ns < 0) v.push_back("[run] drain_ns: negative");

  size_t ncls = num_queue_classes();
  if (!single_queue) {
    if (sched == SchedKind::kWeightedFair && wfq_weights.size() < ncls)
      v.push_back("[fabric] wfq_weights: one weight per class required");
    if (buffer_alloc_bytes.size() < ncls)
      v.push_back("[fabric] buffer_alloc_bytes: one allocation per class");
    uint64_t sum = 0;
    for (uint64_t b : buffer_alloc_bytes) sum += b;
    if (buffer_total_bytes && sum > buffer_total_bytes)
      v.push_back("[fabric] buffer_alloc_bytes: allocations exceed total");
  }
  for (uint32_t w : wfq_weights)
    if (w == 0) v.push_back("[fabric] wfq_weights: zero weight");

  if (size_kind != "uniform" && size_kind != "fixed" && size_kind != "cdf")
    v.push_back("[workload] size_dist: unknown kind `" + size_kind + "`");
  if (size_kind == "uniform" && mean_bytes == 0)
    v.push_back("[workload] mean_bytes: must be > 0");
  if (size_kind == "fixed" && fixed_bytes == 0)
    v.push_back("[workload] fixed_bytes: must be > 0");
  if (size_kind == "cdf" && cdf_file.empty())
    v.push_back("[workload] cdf_file: required for size_dist = cdf");

  auto check_load = [&v](const char* key, double x) {
    if (x < 0.0 || x >= 1.0)
      v.push_back(std::string("[workload] ") + key + ": must be in [0, 1)");
  };
  switch (wl) {
    case WlKind::kDas:
      check_load("load", load);
      if (nodes < 3) v.push_back("[topology] nodes: duplication needs >= 3");
      break;
    case WlKind::kSjf:
      check_load("load", load);
      break;
    case WlKind::kOnOff:
      if (workers < 2) v.push_back("[workload] workers: need >= 2");
      if (workers + 1 > nodes)
        v.push_back("[workload] workers: workers + server exceed nodes");
      if (update_bytes == 0) v.push_back("[workload] update_bytes: zero");
      if (hp_load <= 0.0 || hp_load > 1.0)
        v.push_back("[workload] hp_load: must be in (0, 1]");
      check_load("lp_load", lp_load);
      if (server >= nodes) v.push_back("[workload] server: out of range");
      break;
    case WlKind::kHybrid:
      check_load("hp_load", hp_load);
      check_load("lp_load", lp_load);
      if (hp_load + lp_load >= 1.0)
        v.push_back("[workload] hp_load+lp_load: aggregate must stay below 1");
      if (server >= nodes) v.push_back("[workload] server: out of range");
      break;
  }
  return v;
}

NetConfig ScenarioConfig::net_config() const {
  NetConfig nc;
  nc.nodes = nodes;
  nc.link_rate_bps = link_rate_bps;
  nc.link_prop_ns = link_prop_ns;
  nc.num_classes = num_queue_classes();
  if (single_queue) {
    nc.switch_sched.kind = SchedKind::kStrictPriority;
    nc.port_buffers = BufferPartition{buffer_total_bytes, {buffer_total_bytes}};
    nc.port_ecn = EcnConfig{{0}};
  } else {
    nc.switch_sched.kind = sched;
    nc.switch_sched.weights = wfq_weights;
    nc.port_buffers = BufferPartition{buffer_total_bytes, buffer_alloc_bytes};
    std::vector<uint64_t> ecn = ecn_threshold_bytes;
    ecn.resize(nc.num_classes, 0);
    nc.port_ecn = EcnConfig{ecn};
  }
  nc.host.num_classes = nc.num_classes;
  nc.host.sched.kind = SchedKind::kStrictPriority;
  nc.host.driver_cap_pkts = driver_cap_pkts;
  nc.host.staging_cap_pkts = staging_cap_pkts;
  return nc;
}

SizeDist ScenarioConfig::make_size_dist() const {
  if (size_kind == "uniform") return SizeDist::uniform(1, 2 * mean_bytes);
  if (size_kind == "fixed") return SizeDist::fixed(fixed_bytes);
  if (size_kind == "cdf") return SizeDist::from_cdf_file(cdf_file);
  throw ConfigError("[workload] size_dist: unknown kind `" + size_kind + "`");
}

Trace ScenarioConfig::make_trace(uint64_t seed_value) const {
  WorkloadTopo topo{nodes, double(link_rate_bps)};
  switch (wl) {
    case WlKind::kDas:
      return gen_das(topo, duration_ns, make_size_dist(), load, seed_value);
    case WlKind::kSjf:
      return gen_sjf(topo, duration_ns, make_size_dist(), load, seed_value,
                     long_threshold_bytes);
    case WlKind::kOnOff: {
      OnOffConfig oc;
      oc.workers = workers;
      oc.update_bytes = update_bytes;
      oc.server = server;
      return gen_onoff(topo, duration_ns, oc, hp_load, make_size_dist(),
                       lp_load, seed_value);
    }
    case WlKind::kHybrid:
      return gen_hybrid(topo, duration_ns, make_size_dist(), hp_load, lp_load,
                        server, seed_value);
  }
  throw ConfigError("unreachable workload kind");
}

std::string ScenarioConfig::transport_label(uint8_t cls) const {
  const TransportChoice& t = transport[cls];
  if (t.kind == TransportKind::kNearOpt) return "nearopt";
  switch (t.tcp.flavor) {
    case LpFlavor::kLedbat: return "ledbat";
    case LpFlavor::kTcpLp: return "tcplp";
    case LpFlavor::kFreeze: return "tcpplus";
    default: break;
  }
  std::string s = t.tcp.cc == CcAlgo::kCubic ? "cubic" : "newreno";
  if (t.tcp.sack) s += "-sack";
  return s;
}

}  // namespace priosim
