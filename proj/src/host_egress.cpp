#include "priosim/host_egress.hpp"

namespace priosim {

HostEgress::HostEgress(std::string name, const HostEgressConfig& cfg,
                       ClassQueueBank::DropSink on_drop)
    : name_(std::move(name)),
      driver_cap_(cfg.driver_cap_pkts),
      staging_cap_(cfg.staging_cap_pkts),
      staging_(name_ + ".staging", cfg.num_classes, cfg.sched,
               BufferPartition{}, EcnConfig{}, on_drop),
      driver_bytes_(cfg.num_classes, 0),
      on_drop_(std::move(on_drop)) {
  PSIM_CHECK(driver_cap_ > 0, "driver ring needs capacity");
  if (staging_cap_ > 0) staging_.set_packet_caps(staging_cap_);
}

void HostEgress::refill(SimTime now) {
  while (driver_.size() < driver_cap_ && !staging_.empty()) {
    auto p = staging_.dequeue(now);
    PSIM_CHECK(p.has_value(), "staging dequeue lost a packet");
    driver_bytes_[p->priority_class] += p->size;
    driver_.push_back(std::move(*p));
  }
}

ClassQueueBank::Admit HostEgress::enqueue(Packet&& p, SimTime now) {
  refill(now);
  if (staging_.empty() && driver_.size() < driver_cap_) {
    driver_bytes_[p.priority_class] += p.size;
    driver_.push_back(std::move(p));
    if (wire_) wire_->kick();
    return ClassQueueBank::Admit::kAccepted;
  }
  if (staging_cap_ == 0) {
    // No staging stage configured: a full driver ring is a local drop.
    if (on_drop_) on_drop_(DropInfo{&p, name_});
    return ClassQueueBank::Admit::kDropped;
  }
  auto admit = staging_.enqueue(std::move(p), now);
  refill(now);
  if (wire_) wire_->kick();
  return admit;
}

std::optional<Packet> HostEgress::poll(SimTime now) {
  if (driver_.empty()) refill(now);
  if (driver_.empty()) return std::nullopt;
  Packet p = std::move(driver_.front());
  driver_.pop_front();
  driver_bytes_[p.priority_class] -= p.size;
  refill(now);
  return p;
}

}  // namespace priosim
