#ifndef PRIOSIM_WIRE_HPP
#define PRIOSIM_WIRE_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "priosim/engine.hpp"
#include "priosim/packet.hpp"

namespace priosim {

// Something a wire can pull packets from. The pull happens at service time,
// so the scheduling decision is made when the line goes idle, not earlier.
class PacketSource {
 public:
  virtual ~PacketSource() = default;
  virtual std::optional<Packet> poll(SimTime now) = 0;
};

// One direction of a link: serialization at rate_bps, then fixed propagation
// delay. Delivery order is FIFO by construction (constant delay).
class Wire {
 public:
  using Deliver = std::function<void(Packet&&)>;

  Wire(EventEngine& eng, std::string name, uint64_t rate_bps, SimTime prop_ns,
       size_t num_classes, PacketSource& src, Deliver deliver);

  // Nudge the wire: if idle and the source has a packet, start transmitting.
  void kick();

  SimTime serialization_delay(uint32_t bytes) const {
    // Ceil so we never under-account the medium.
    uint64_t bits = uint64_t{bytes} * 8;
    return static_cast<SimTime>((bits * 1000000000ULL + rate_bps_ - 1) / rate_bps_);
  }

  const std::string& name() const { return name_; }
  uint64_t rate_bps() const { return rate_bps_; }
  SimTime prop_ns() const { return prop_ns_; }

  // Cumulative stats.
  uint64_t tx_bytes() const { return tx_bytes_; }
  uint64_t tx_packets() const { return tx_pkts_; }
  SimTime busy_ns() const { return busy_ns_; }

  // Per-class bytes handed to the line since the last harvest; the fair-rate
  // tracker drains these once per round.
  uint64_t harvest_round_bytes(size_t cls) {
    uint64_t v = round_bytes_[cls];
    round_bytes_[cls] = 0;
    return v;
  }
  uint64_t peek_round_bytes(size_t cls) const { return round_bytes_[cls]; }

 private:
  void start_tx(Packet&& p);
  void on_tx_done();
  void on_arrival();

  EventEngine& eng_;
  std::string name_;
  uint64_t rate_bps_;
  SimTime prop_ns_;
  PacketSource& src_;
  Deliver deliver_;

  bool transmitting_ = false;
  std::deque<Packet> in_flight_;  // serialized, propagating

  std::vector<uint64_t> round_bytes_;
  uint64_t tx_bytes_ = 0, tx_pkts_ = 0;
  SimTime busy_ns_ = 0;
};

}  // namespace priosim

#endif
