#include "priosim/link_tracker.hpp"

#include "priosim/nearopt.hpp"

namespace priosim {

LinkLoadTracker::LinkLoadTracker(EventEngine& eng, Wire& wire,
                                 const QueueProbe& queues, size_t num_classes,
                                 SimTime round_ns)
    : eng_(eng),
      wire_(wire),
      queues_(queues),
      round_(round_ns),
      b_prev_(num_classes, 0),
      q_now_(num_classes, 0),
      flows_(num_classes, 0),
      fair_(num_classes, 0.0),
      members_(num_classes) {
  PSIM_CHECK(round_ > 0, "round length must be positive");
  recompute();
}

void LinkLoadTracker::start() {
  if (started_) return;
  started_ = true;
  eng_.schedule_in(round_, [this] { roll(); });
}

void LinkLoadTracker::roll() {
  for (size_t c = 0; c < b_prev_.size(); ++c) {
    b_prev_[c] = wire_.harvest_round_bytes(c);
    q_now_[c] = queues_.queued_bytes(c);
  }
  recompute();
  eng_.schedule_in(round_, [this] { roll(); });
}

void LinkLoadTracker::roll_with(const std::vector<uint64_t>& b_bytes,
                                const std::vector<uint64_t>& q_bytes) {
  b_prev_ = b_bytes;
  q_now_ = q_bytes;
  recompute();
}

void LinkLoadTracker::recompute() {
  const double r_link = static_cast<double>(wire_.rate_bps());
  const double t_sec = static_cast<double>(round_) / 1e9;
  double higher_b = 0.0;  // strictly higher classes' bytes last round
  double queued = 0.0;    // queues through this class, inclusive
  for (size_t i = 0; i < fair_.size(); ++i) {
    queued += static_cast<double>(q_now_[i]) * 8.0;
    double rate = 0.0;
    if (flows_[i] > 0) {
      double avail = r_link - higher_b / t_sec - queued / t_sec;
      rate = avail > 0.0 ? avail / flows_[i] : 0.0;
    }
    fair_[i] = rate;
    higher_b += static_cast<double>(b_prev_[i]) * 8.0;
  }
  for (auto& per_class : members_)
    for (auto& [id, s] : per_class)
      if (s) s->on_rate_change();
}

void LinkLoadTracker::register_flow(size_t cls, FlowId id, NearOptSender* s) {
  flows_[cls]++;
  members_[cls][id] = s;
  recompute();
}

void LinkLoadTracker::deregister_flow(size_t cls, FlowId id) {
  PSIM_CHECK(flows_[cls] > 0, "deregister with no registered flows");
  flows_[cls]--;
  members_[cls].erase(id);
  recompute();
}

}  // namespace priosim
