#ifndef PRIOSIM_PACKET_HPP
#define PRIOSIM_PACKET_HPP

#include <array>
#include <cstdint>

#include "priosim/common.hpp"

namespace priosim {

enum class PktKind : uint8_t { kData, kAck, kProbe, kProbeEcho };

struct SackBlock {
  uint64_t start = 0;
  uint64_t end = 0;  // half-open [start, end)
};

// Ack payload, also carried by data packets as zeros. The echo fields stand
// in for the TCP timestamp option: the receiver copies the data packet's
// send time back so the sender can take Karn-filtered RTT samples and the
// delay-based variants can see one-way delay.
struct AckFields {
  uint64_t cum = 0;
  uint8_t nblocks = 0;
  std::array<SackBlock, 3> blocks{};
  SimTime echo_sent_at = 0;
  bool echo_retx = false;
  SimTime echo_owd = 0;  // one-way delay seen by the receiver
};

struct Packet {
  FlowId flow = 0;
  NodeId src = 0;
  NodeId dst = 0;
  PktKind kind = PktKind::kData;
  uint32_t size = 0;  // wire bytes, headers included
  uint8_t priority_class = 0;
  uint64_t seq_start = 0;
  uint64_t seq_end = 0;
  bool retx = false;
  bool ecn_capable = false;
  bool ecn_marked = false;
  SimTime sent_at = 0;
  uint32_t probe_seq = 0;
  AckFields ack{};
};

}  // namespace priosim

#endif
