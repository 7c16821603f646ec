#include "priosim/simulation.hpp"

namespace priosim {

Simulation::Simulation(const ScenarioConfig& cfg)
    : cfg_(cfg),
      net_(eng_, cfg.net_config(),
           [this](NodeId h, Packet&& p) { deliver(h, std::move(p)); },
           [this](const DropInfo& d) { on_drop(d); }) {
  auto viol = cfg_.validate();
  if (!viol.empty()) {
    std::string msg = "invalid scenario:";
    for (auto& v : viol) msg += "\n  " + v;
    throw ConfigError(msg);
  }
  bool nearopt = cfg_.transport[0].kind == TransportKind::kNearOpt ||
                 cfg_.transport[1].kind == TransportKind::kNearOpt;
  if (nearopt) {
    size_t ncls = cfg_.num_queue_classes();
    for (NodeId h = 0; h < cfg_.nodes; ++h) {
      up_trk_.push_back(std::make_unique<LinkLoadTracker>(
          eng_, net_.uplink(h), net_.uplink_probe(h), ncls,
          cfg_.link_prop_ns));
      down_trk_.push_back(std::make_unique<LinkLoadTracker>(
          eng_, net_.downlink(h), net_.downlink_probe(h), ncls,
          cfg_.link_prop_ns));
    }
  }
}

RunResult Simulation::run(const Trace& trace) {
  PSIM_CHECK(!ran_, "simulation object is single-use");
  ran_ = true;
  for (const FlowSpec& f : trace) {
    PSIM_CHECK(f.src < cfg_.nodes && f.dst < cfg_.nodes && f.src != f.dst,
               "flow endpoints invalid");
    PSIM_CHECK(f.priority_class < 2, "flow class out of range");
    metrics_.on_arrival(f);
    flows_.emplace(f.id, f);
  }
  for (auto& t : up_trk_) t->start();
  for (auto& t : down_trk_) t->start();
  // Arrival ties (incast bursts) fire in flow-id order.
  for (auto& [id, f] : flows_) {
    FlowId fid = id;
    eng_.schedule_at(f.arrival_ns, [this, fid] { start_flow(fid); });
  }
  auto stats = eng_.run_until(cfg_.duration_ns + cfg_.drain_ns);
  net_.check_conservation();

  RunResult r;
  r.ended_at = eng_.now();
  r.dispatched = stats.dispatched;
  for (NodeId h = 0; h < cfg_.nodes; ++h) {
    Wire& up = net_.uplink(h);
    Wire& down = net_.downlink(h);
    r.utils.push_back({up.name(), up.busy_ns(), r.ended_at});
    r.utils.push_back({down.name(), down.busy_ns(), r.ended_at});
  }
  for (auto& [key, pc] : pairs_) r.cqcn_pauses += pc->stats().pauses;
  for (auto& [id, s] : tcp_tx_) r.frozen_sends += s->stats().frozen_sends;
  r.drops_total = drops_seen_;
  r.data_drops = ledger_.total_drops();
  r.metrics = std::move(metrics_);
  return r;
}

void Simulation::start_flow(FlowId id) {
  const FlowSpec& f = flows_.at(id);
  const TransportChoice& tc = cfg_.transport[f.priority_class];
  rx_.emplace(id, std::make_unique<TcpReceiver>(*this, f, tc.tcp));
  if (tc.kind == TransportKind::kNearOpt) {
    NearOptSender::Config nc;
    nc.mss = tc.tcp.mss;
    nc.header_bytes = tc.tcp.header_bytes;
    nc.check_interval = cfg_.nearopt_check_ns;
    auto s = std::make_unique<NearOptSender>(*this, f, nc, &ledger_,
                                             up_trk_[f.src].get(),
                                             down_trk_[f.dst].get());
    NearOptSender* sp = s.get();
    no_tx_.emplace(id, std::move(s));
    sp->start();
    return;
  }
  auto s = std::make_unique<TcpSender>(*this, f, tc.tcp, &ledger_);
  TcpSender* sp = s.get();
  tcp_tx_.emplace(id, std::move(s));
  if (tc.tcp.flavor == LpFlavor::kFreeze) {
    auto key = std::make_pair(f.src, f.dst);
    auto it = pairs_.find(key);
    if (it == pairs_.end())
      it = pairs_
               .emplace(key, std::make_unique<CqcnPairController>(
                                 *this, f.src, f.dst, tc.tcp))
               .first;
    it->second->add_member(id, sp);
  }
  sp->start();
}

void Simulation::flow_completed(FlowId id, const FlowStats& st) {
  metrics_.on_completion(id, st, eng_.now());
  const FlowSpec& f = flows_.at(id);
  const TransportChoice& tc = cfg_.transport[f.priority_class];
  if (tc.kind == TransportKind::kTcp && tc.tcp.flavor == LpFlavor::kFreeze) {
    auto it = pairs_.find(std::make_pair(f.src, f.dst));
    if (it != pairs_.end()) it->second->remove_member(id);
  }
}

void Simulation::deliver(NodeId host, Packet&& p) {
  switch (p.kind) {
    case PktKind::kData: {
      auto it = rx_.find(p.flow);
      PSIM_CHECK(it != rx_.end(), "data for unknown flow");
      it->second->on_data(p);
      return;
    }
    case PktKind::kAck: {
      if (auto it = tcp_tx_.find(p.flow); it != tcp_tx_.end()) {
        it->second->on_ack(p);
        return;
      }
      if (auto it = no_tx_.find(p.flow); it != no_tx_.end()) {
        it->second->on_ack(p);
        return;
      }
      throw SimFault("ack for unknown flow");
    }
    case PktKind::kProbe: {
      Packet echo;
      echo.src = host;
      echo.dst = p.src;
      echo.kind = PktKind::kProbeEcho;
      echo.size = p.size;
      echo.priority_class = 0;
      echo.probe_seq = p.probe_seq;
      echo.ecn_marked = p.ecn_marked;  // the congestion verdict rides back
      echo.sent_at = now();
      emit_from(host, std::move(echo));
      return;
    }
    case PktKind::kProbeEcho: {
      auto it = pairs_.find(std::make_pair(p.dst, p.src));
      if (it != pairs_.end()) it->second->on_echo(p.ecn_marked);
      return;
    }
  }
}

void Simulation::on_drop(const DropInfo& d) {
  drops_seen_++;
  if (d.pkt->kind == PktKind::kData)
    ledger_.record_drop(d.pkt->flow, d.pkt->seq_start, d.pkt->seq_end);
}

}  // namespace priosim
