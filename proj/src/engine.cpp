#include "priosim/engine.hpp"

#include <utility>

namespace priosim {

EventEngine::Ticket EventEngine::schedule_at(SimTime t, std::function<void()> fn) {
  PSIM_CHECK(t >= now_, "schedule_at: event scheduled in the past");
  Ticket id = next_seq_++;
  heap_.push(Ev{t, id, std::move(fn)});
  return id;
}

void EventEngine::cancel(Ticket t) { cancelled_.insert(t); }

EventEngine::RunStats EventEngine::run_until(SimTime t_end) {
  PSIM_CHECK(t_end >= now_, "run_until: horizon behind current clock");
  RunStats st;
  while (!heap_.empty() && heap_.top().at <= t_end) {
    Ev ev = std::move(const_cast<Ev&>(heap_.top()));
    heap_.pop();
    if (!cancelled_.empty() && cancelled_.erase(ev.seq)) continue;
    now_ = ev.at;
    ev.fn();
    ++st.dispatched;
  }
  now_ = t_end;
  return st;
}

}  // namespace priosim
