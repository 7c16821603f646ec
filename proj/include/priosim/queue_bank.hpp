#ifndef PRIOSIM_QUEUE_BANK_HPP
#define PRIOSIM_QUEUE_BANK_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "priosim/packet.hpp"

namespace priosim {

enum class SchedKind : uint8_t { kStrictPriority, kWeightedFair };

// Scheduler across the class queues of one egress. Weighted fair queueing is
// realized as deficit round robin with quantum = weight * one MTU.
struct SchedulerPolicy {
  SchedKind kind = SchedKind::kStrictPriority;
  std::vector<uint32_t> weights;  // per class, used by kWeightedFair
  uint32_t quantum_bytes = 1500;  // per weight unit
};

// Static buffer carve-up of one port. Allocations are hard per-class caps;
// their sum must not exceed the port total.
struct BufferPartition {
  uint64_t port_total_bytes = 0;
  std::vector<uint64_t> alloc_bytes;  // per class; 0 = unlimited
};

struct EcnConfig {
  // Mark threshold per class in bytes of queued data; 0 disables marking.
  std::vector<uint64_t> threshold_bytes;
};

// Where a packet died, for the drop sink.
struct DropInfo {
  const Packet* pkt;
  std::string_view where;  // egress name
};

// A set of per-class FIFO queues in front of one transmission opportunity:
// a switch egress port or a host's traffic-class staging stage. Admission is
// drop-tail against per-class caps (bytes and/or packets); dequeue order is
// decided by the scheduler at service time, never at admission.
class ClassQueueBank {
 public:
  using DropSink = std::function<void(const DropInfo&)>;

  ClassQueueBank(std::string name, size_t num_classes, SchedulerPolicy pol,
                 BufferPartition part, EcnConfig ecn, DropSink on_drop);

  enum class Admit { kAccepted, kDropped };

  // Caps in packets per class (host driver-stage staging); 0 = unlimited.
  void set_packet_caps(uint64_t per_class_packets);

  Admit enqueue(Packet&& p, SimTime now);

  // Returns the next packet per policy, or nothing if all queues are empty.
  std::optional<Packet> dequeue(SimTime now);

  bool empty() const { return resident_pkts_ == 0; }
  uint64_t class_bytes(size_t cls) const { return cls_[cls].bytes; }
  uint64_t class_packets(size_t cls) const { return cls_[cls].q.size(); }
  uint64_t resident_packets() const { return resident_pkts_; }
  size_t num_classes() const { return cls_.size(); }
  const std::string& name() const { return name_; }

  // Conservation counters (bytes): enqueued == dequeued + dropped + resident.
  uint64_t enqueued_bytes() const { return enq_bytes_; }
  uint64_t dequeued_bytes() const { return deq_bytes_; }
  uint64_t dropped_bytes() const { return drop_bytes_; }
  uint64_t resident_bytes() const { return resident_bytes_; }
  uint64_t dropped_packets(size_t cls) const { return cls_[cls].dropped_pkts; }

  void check_conservation() const;

 private:
  struct ClassQ {
    std::deque<Packet> q;
    uint64_t bytes = 0;
    uint64_t cap_bytes = 0;    // 0 = unlimited
    uint64_t cap_packets = 0;  // 0 = unlimited
    uint64_t ecn_thresh = 0;   // 0 = no marking
    uint64_t deficit = 0;
    uint64_t dropped_pkts = 0;
    bool active = false;  // member of drr active list
  };

  std::optional<Packet> take_from(size_t cls);

  std::string name_;
  SchedulerPolicy pol_;
  std::vector<ClassQ> cls_;
  std::deque<uint32_t> drr_active_;
  DropSink on_drop_;

  uint64_t resident_pkts_ = 0;
  uint64_t enq_bytes_ = 0, deq_bytes_ = 0, drop_bytes_ = 0, resident_bytes_ = 0;
};

}  // namespace priosim

#endif
