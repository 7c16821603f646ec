#include "priosim/network.hpp"

namespace priosim {

Network::Network(EventEngine& eng, const NetConfig& cfg, DeliverToHost deliver,
                 ClassQueueBank::DropSink on_drop)
    : eng_(eng), deliver_(std::move(deliver)) {
  PSIM_CHECK(cfg.nodes >= 2, "topology needs at least two hosts");
  hosts_.reserve(cfg.nodes);
  ports_.reserve(cfg.nodes);
  for (uint32_t h = 0; h < cfg.nodes; ++h) {
    std::string hn = "h" + std::to_string(h);

    auto host = std::make_unique<HostSide>(hn, cfg.host, on_drop);
    host->wire = std::make_unique<Wire>(
        eng_, hn + "->sw", cfg.link_rate_bps, cfg.link_prop_ns,
        cfg.num_classes, host->egress,
        [this](Packet&& p) { switch_ingress(std::move(p)); });
    host->egress.attach_wire(host->wire.get());
    hosts_.push_back(std::move(host));

    auto port = std::make_unique<PortSide>("sw." + hn, cfg.num_classes,
                                           cfg.switch_sched, cfg.port_buffers,
                                           cfg.port_ecn, on_drop);
    port->wire = std::make_unique<Wire>(
        eng_, "sw->" + hn, cfg.link_rate_bps, cfg.link_prop_ns,
        cfg.num_classes, port->source,
        [this, h](Packet&& p) { deliver_(h, std::move(p)); });
    ports_.push_back(std::move(port));
  }
}

void Network::send_from(NodeId host, Packet&& p, SimTime now) {
  PSIM_CHECK(host < hosts_.size(), "send_from: unknown host");
  PSIM_CHECK(p.dst < ports_.size() && p.dst != host,
             "send_from: bad destination");
  hosts_[host]->egress.enqueue(std::move(p), now);
  hosts_[host]->wire->kick();
}

void Network::switch_ingress(Packet&& p) {
  // Zero-delay forwarding decision; contention is at the egress port.
  PortSide& port = *ports_[p.dst];
  if (port.bank.enqueue(std::move(p), eng_.now()) ==
      ClassQueueBank::Admit::kAccepted)
    port.wire->kick();
}

void Network::check_conservation() const {
  for (auto& h : hosts_) h->egress.staging().check_conservation();
  for (auto& pt : ports_) pt->bank.check_conservation();
}

}  // namespace priosim
