#ifndef PRIOSIM_SIM_CONTEXT_HPP
#define PRIOSIM_SIM_CONTEXT_HPP

#include <functional>

#include "priosim/common.hpp"
#include "priosim/engine.hpp"
#include "priosim/packet.hpp"

namespace priosim {

struct FlowStats {
  uint64_t data_pkts_sent = 0;  // transmissions, retransmissions included
  uint64_t retx = 0;
  uint64_t spurious_retx = 0;
  uint64_t frozen_sends = 0;  // emissions while paused; must stay 0
};

// What a transport endpoint can see of the world. The full simulation
// implements this; unit tests drive endpoints with a bench harness instead.
class SimContext {
 public:
  virtual ~SimContext() = default;
  virtual SimTime now() const = 0;
  virtual EventEngine::Ticket schedule_at(SimTime t, std::function<void()> fn) = 0;
  EventEngine::Ticket schedule_in(SimTime dt, std::function<void()> fn) {
    return schedule_at(now() + dt, std::move(fn));
  }
  // Hand a packet to the sending host's egress path.
  virtual void emit_from(NodeId host, Packet&& p) = 0;
  virtual void flow_completed(FlowId f, const FlowStats& st) = 0;
  // Logical flow class -> queue class (collapses to 0 in single-queue mode).
  virtual uint8_t queue_class(uint8_t logical) const = 0;
};

}  // namespace priosim

#endif
