#ifndef PRIOSIM_NETWORK_HPP
#define PRIOSIM_NETWORK_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "priosim/engine.hpp"
#include "priosim/host_egress.hpp"
#include "priosim/queue_bank.hpp"
#include "priosim/wire.hpp"

namespace priosim {

struct NetConfig {
  uint32_t nodes = 40;
  uint64_t link_rate_bps = 10'000'000'000ULL;
  SimTime link_prop_ns = 25 * kUsec;  // base RTT = 4 hops = 100us
  size_t num_classes = 2;
  SchedulerPolicy switch_sched;
  BufferPartition port_buffers;  // per switch egress port
  EcnConfig port_ecn;
  HostEgressConfig host;
};

// Star topology: every host has a full-duplex link to one switch. Forwarding
// inside the switch is instantaneous; queueing happens at the egress port of
// the destination's downlink and in the sender's host egress path.
class Network {
 public:
  using DeliverToHost = std::function<void(NodeId host, Packet&&)>;

  Network(EventEngine& eng, const NetConfig& cfg, DeliverToHost deliver,
          ClassQueueBank::DropSink on_drop);

  void send_from(NodeId host, Packet&& p, SimTime now);

  uint32_t nodes() const { return static_cast<uint32_t>(hosts_.size()); }

  Wire& uplink(NodeId h) { return *hosts_[h]->wire; }
  Wire& downlink(NodeId h) { return *ports_[h]->wire; }
  HostEgress& host_egress(NodeId h) { return hosts_[h]->egress; }
  ClassQueueBank& port_bank(NodeId h) { return ports_[h]->bank; }
  const QueueProbe& uplink_probe(NodeId h) const { return hosts_[h]->egress; }
  const QueueProbe& downlink_probe(NodeId h) const { return *ports_[h]; }

  void check_conservation() const;

 private:
  struct HostSide {
    HostEgress egress;
    std::unique_ptr<Wire> wire;  // host -> switch
    HostSide(std::string name, const HostEgressConfig& cfg,
             ClassQueueBank::DropSink sink)
        : egress(std::move(name), cfg, std::move(sink)) {}
  };
  struct PortSide : QueueProbe {
    ClassQueueBank bank;
    std::unique_ptr<Wire> wire;  // switch -> host
    struct Source : PacketSource {
      ClassQueueBank* b;
      std::optional<Packet> poll(SimTime now) override { return b->dequeue(now); }
    } source;
    PortSide(std::string name, size_t ncls, SchedulerPolicy pol,
             BufferPartition part, EcnConfig ecn, ClassQueueBank::DropSink sink)
        : bank(std::move(name), ncls, std::move(pol), std::move(part),
               std::move(ecn), std::move(sink)) {
      source.b = &bank;
    }
    uint64_t queued_bytes(size_t cls) const override {
      return bank.class_bytes(cls);
    }
  };

  void switch_ingress(Packet&& p);

  EventEngine& eng_;
  DeliverToHost deliver_;
  std::vector<std::unique_ptr<HostSide>> hosts_;
  std::vector<std::unique_ptr<PortSide>> ports_;
};

}  // namespace priosim

#endif
