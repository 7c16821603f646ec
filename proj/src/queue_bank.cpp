#include "priosim/queue_bank.hpp"

#include <numeric>

namespace priosim {

ClassQueueBank::ClassQueueBank(std::string name, size_t num_classes,
                               SchedulerPolicy pol, BufferPartition part,
                               EcnConfig ecn, DropSink on_drop)
    : name_(std::move(name)), pol_(std::move(pol)), on_drop_(std::move(on_drop)) {
  PSIM_CHECK(num_classes >= 1, "queue bank needs at least one class");
  if (pol_.kind == SchedKind::kWeightedFair) {
    PSIM_CHECK(pol_.weights.size() == num_classes,
               "wfq weights must cover every class");
    for (uint32_t w : pol_.weights)
      PSIM_CHECK(w > 0, "wfq weights must be positive");
  }
  if (part.port_total_bytes > 0 && !part.alloc_bytes.empty()) {
    uint64_t sum = std::accumulate(part.alloc_bytes.begin(),
                                   part.alloc_bytes.end(), uint64_t{0});
    PSIM_CHECK(sum <= part.port_total_bytes,
               "buffer allocations exceed port total");
  }
  cls_.resize(num_classes);
  for (size_t i = 0; i < num_classes; ++i) {
    if (i < part.alloc_bytes.size()) cls_[i].cap_bytes = part.alloc_bytes[i];
    if (i < ecn.threshold_bytes.size()) cls_[i].ecn_thresh = ecn.threshold_bytes[i];
  }
}

void ClassQueueBank::set_packet_caps(uint64_t per_class_packets) {
  for (auto& c : cls_) c.cap_packets = per_class_packets;
}

ClassQueueBank::Admit ClassQueueBank::enqueue(Packet&& p, SimTime now) {
  PSIM_CHECK(p.priority_class < cls_.size(), "packet class out of range");
  PSIM_CHECK(p.kind != PktKind::kProbe || p.priority_class == 0,
             "probes must ride the high-priority class");
  ClassQ& c = cls_[p.priority_class];
  enq_bytes_ += p.size;  // counts every offered byte, dropped or admitted
  bool over_bytes = c.cap_bytes > 0 && c.bytes + p.size > c.cap_bytes;
  bool over_pkts = c.cap_packets > 0 && c.q.size() + 1 > c.cap_packets;
  if (over_bytes || over_pkts) {
    drop_bytes_ += p.size;
    c.dropped_pkts++;
    if (on_drop_) on_drop_(DropInfo{&p, name_});
    return Admit::kDropped;
  }
  // Mark against the occupancy seen on arrival, before this packet joins.
  if (p.ecn_capable && c.ecn_thresh > 0 && c.bytes >= c.ecn_thresh)
    p.ecn_marked = true;
  (void)now;
  resident_bytes_ += p.size;
  resident_pkts_++;
  c.bytes += p.size;
  if (pol_.kind == SchedKind::kWeightedFair && !c.active) {
    c.active = true;
    drr_active_.push_back(p.priority_class);
  }
  c.q.push_back(std::move(p));
  return Admit::kAccepted;
}

std::optional<Packet> ClassQueueBank::take_from(size_t cls) {
  ClassQ& c = cls_[cls];
  Packet p = std::move(c.q.front());
  c.q.pop_front();
  c.bytes -= p.size;
  deq_bytes_ += p.size;
  resident_bytes_ -= p.size;
  resident_pkts_--;
  return p;
}

std::optional<Packet> ClassQueueBank::dequeue(SimTime now) {
  (void)now;
  if (resident_pkts_ == 0) return std::nullopt;
  if (pol_.kind == SchedKind::kStrictPriority) {
    for (size_t i = 0; i < cls_.size(); ++i)
      if (!cls_[i].q.empty()) return take_from(i);
    return std::nullopt;
  }
  // Deficit round robin. A class earns weight * quantum each time its turn
  // comes around; leftover deficit dies with an emptied queue.
  while (true) {
    PSIM_CHECK(!drr_active_.empty(), "drr active list out of sync");
    uint32_t idx = drr_active_.front();
    ClassQ& c = cls_[idx];
    if (c.q.empty()) {
      c.active = false;
      c.deficit = 0;
      drr_active_.pop_front();
      continue;
    }
    if (c.deficit >= c.q.front().size) {
      c.deficit -= c.q.front().size;
      auto p = take_from(idx);
      if (c.q.empty()) {
        c.active = false;
        c.deficit = 0;
        drr_active_.pop_front();
      }
      return p;
    }
    c.deficit += uint64_t{pol_.weights[idx]} * pol_.quantum_bytes;
    drr_active_.pop_front();
    drr_active_.push_back(idx);
  }
}

void ClassQueueBank::check_conservation() const {
  PSIM_CHECK(enq_bytes_ == deq_bytes_ + drop_bytes_ + resident_bytes_,
             name_ + ": byte conservation violated");
}

}  // namespace priosim
