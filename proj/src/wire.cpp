#include "priosim/wire.hpp"

namespace priosim {

Wire::Wire(EventEngine& eng, std::string name, uint64_t rate_bps,
           SimTime prop_ns, size_t num_classes, PacketSource& src,
           Deliver deliver)
    : eng_(eng),
      name_(std::move(name)),
      rate_bps_(rate_bps),
      prop_ns_(prop_ns),
      src_(src),
      deliver_(std::move(deliver)),
      round_bytes_(num_classes, 0) {
  PSIM_CHECK(rate_bps_ > 0, "wire rate must be positive");
  PSIM_CHECK(prop_ns_ >= 0, "wire propagation must be non-negative");
}

void Wire::kick() {
  if (transmitting_) return;
  if (auto p = src_.poll(eng_.now())) start_tx(std::move(*p));
}

void Wire::start_tx(Packet&& p) {
  transmitting_ = true;
  SimTime ser = serialization_delay(p.size);
  busy_ns_ += ser;
  tx_bytes_ += p.size;
  tx_pkts_++;
  round_bytes_[p.priority_class] += p.size;
  in_flight_.push_back(std::move(p));
  eng_.schedule_in(ser, [this] { on_tx_done(); });
}

void Wire::on_tx_done() {
  transmitting_ = false;
  // The freshly serialized packet is the back of the flight queue; it lands
  // prop_ns from now. Events capture only `this`, the packet rides in the
  // member deque (FIFO is safe: constant propagation delay).
  eng_.schedule_in(prop_ns_, [this] { on_arrival(); });
  kick();
}

void Wire::on_arrival() {
  PSIM_CHECK(!in_flight_.empty(), "wire delivery with empty flight queue");
  Packet p = std::move(in_flight_.front());
  in_flight_.pop_front();
  deliver_(std::move(p));
}

}  // namespace priosim
