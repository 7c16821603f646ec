#ifndef PRIOSIM_LINK_TRACKER_HPP
#define PRIOSIM_LINK_TRACKER_HPP

#include <map>
#include <vector>

#include "priosim/engine.hpp"
#include "priosim/host_egress.hpp"
#include "priosim/wire.hpp"

namespace priosim {

class NearOptSender;

// Per-link fair-rate bookkeeping for the omniscient transport. Time is cut
// into rounds of length T (the link delay). At each boundary the tracker
// snapshots B_c, the bytes each class put on the line last round, and Q_c,
// the bytes each class has queued right now, and recomputes the per-class
// fair rate
//
//   r_i = ( R - sum_{c<i} B_c/T - sum_{c<=i} Q_c/T ) / |F_i|
//
// i.e. capacity left after strictly-higher classes' measured usage, minus a
// term that drains standing queues up to and including class i, split evenly
// over the class's active flows. Negative numerators clamp to zero. Rates
// are refreshed instantly when |F| changes; B and Q refresh only at rounds.
class LinkLoadTracker {
 public:
  LinkLoadTracker(EventEngine& eng, Wire& wire, const QueueProbe& queues,
                  size_t num_classes, SimTime round_ns);

  void start();  // begin the round clock

  double fair_rate_bps(size_t cls) const { return fair_[cls]; }
  uint32_t flow_count(size_t cls) const { return flows_[cls]; }
  SimTime round_ns() const { return round_; }

  void register_flow(size_t cls, FlowId id, NearOptSender* s);
  void deregister_flow(size_t cls, FlowId id);

  // Testing hook: force a round boundary with explicit B/Q samples.
  void roll_with(const std::vector<uint64_t>& b_bytes,
                 const std::vector<uint64_t>& q_bytes);

 private:
  void roll();
  void recompute();

  EventEngine& eng_;
  Wire& wire_;
  const QueueProbe& queues_;
  SimTime round_;
  std::vector<uint64_t> b_prev_;   // bytes sent last round, per class
  std::vector<uint64_t> q_now_;    // queued bytes at last roll, per class
  std::vector<uint32_t> flows_;    // |F| per class
  std::vector<double> fair_;       // bps per class
  // Flow registry ordered by id so wakeups replay deterministically.
  std::vector<std::map<FlowId, NearOptSender*>> members_;
  bool started_ = false;
};

}  // namespace priosim

#endif
