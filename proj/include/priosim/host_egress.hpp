#ifndef PRIOSIM_HOST_EGRESS_HPP
#define PRIOSIM_HOST_EGRESS_HPP

#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "priosim/queue_bank.hpp"
#include "priosim/wire.hpp"

namespace priosim {

// Read-only view of an egress backlog, per class. The fair-rate bookkeeping
// samples these at round boundaries.
class QueueProbe {
 public:
  virtual ~QueueProbe() = default;
  virtual uint64_t queued_bytes(size_t cls) const = 0;
};

struct HostEgressConfig {
  size_t num_classes = 2;
  SchedulerPolicy sched;            // default strict priority
  uint64_t driver_cap_pkts = 100;   // NIC driver ring, FIFO
  uint64_t staging_cap_pkts = 1000; // per-class qdisc stage; 0 = none
};

// Host-side egress path: per-class staging queues drain into a short FIFO
// driver ring via the host scheduler, so a low-priority packet never enters
// the driver ahead of a waiting high-priority one. The driver ring is where
// priority inversion can still happen, which is why it is kept short.
class HostEgress : public PacketSource, public QueueProbe {
 public:
  HostEgress(std::string name, const HostEgressConfig& cfg,
             ClassQueueBank::DropSink on_drop);

  ClassQueueBank::Admit enqueue(Packet&& p, SimTime now);

  // PacketSource (the uplink wire pulls from the driver ring).
  std::optional<Packet> poll(SimTime now) override;

  // QueueProbe: staging + driver backlog of one class.
  uint64_t queued_bytes(size_t cls) const override {
    return staging_.class_bytes(cls) + driver_bytes_[cls];
  }

  uint64_t driver_packets() const { return driver_.size(); }
  const ClassQueueBank& staging() const { return staging_; }
  void attach_wire(Wire* w) { wire_ = w; }

 private:
  void refill(SimTime now);

  std::string name_;
  uint64_t driver_cap_;
  uint64_t staging_cap_;
  ClassQueueBank staging_;
  std::deque<Packet> driver_;
  std::vector<uint64_t> driver_bytes_;
  ClassQueueBank::DropSink on_drop_;
  Wire* wire_ = nullptr;
};

}  // namespace priosim

#endif
