#ifndef PRIOSIM_ENGINE_HPP
#define PRIOSIM_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "priosim/common.hpp"

namespace priosim {

// Discrete-event scheduler. Events fire in (time, insertion sequence) order,
// so simultaneous events dispatch in the order they were scheduled and a run
// is fully reproducible.
class EventEngine {
 public:
  using Ticket = uint64_t;

  Ticket schedule_at(SimTime t, std::function<void()> fn);
  Ticket schedule_in(SimTime dt, std::function<void()> fn) {
    return schedule_at(now_ + dt, std::move(fn));
  }

  // Lazy cancellation: the event is skipped when popped. Cancelling an
  // already-fired ticket is a no-op.
  void cancel(Ticket t);

  struct RunStats {
    uint64_t dispatched = 0;
  };

  // Dispatches every event with fire_at <= t_end (including ones scheduled
  // while running). The clock never exceeds t_end and rests there on return.
  RunStats run_until(SimTime t_end);

  SimTime now() const { return now_; }
  size_t pending() const { return heap_.size() - cancelled_.size(); }

 private:
  struct Ev {
    SimTime at;
    uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Ev& a, const Ev& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Ev, std::vector<Ev>, Later> heap_;
  std::unordered_set<Ticket> cancelled_;
  SimTime now_ = 0;
  uint64_t next_seq_ = 0;
};

}  // namespace priosim

#endif
