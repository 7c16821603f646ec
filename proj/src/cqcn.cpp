#include "priosim/cqcn.hpp"

namespace priosim {

void CqcnPairController::add_member(FlowId f, TcpSender* s) {
  bool was_idle = members_.empty();
  members_.emplace(f, s);
  if (paused_) s->freeze();  // joins mid-pause: starts held
  if (was_idle) {
    probe_epoch_++;
    send_probe();
  }
}

void CqcnPairController::remove_member(FlowId f) {
  members_.erase(f);
  if (members_.empty()) {
    probe_epoch_++;  // stop probing; state resets for the next flow
    paused_ = false;
  }
}

void CqcnPairController::on_echo(bool marked) {
  if (members_.empty()) return;
  if (marked) {
    stats_.echoes_marked++;
    if (!paused_) {
      paused_ = true;
      stats_.pauses++;
      for (auto& [id, s] : members_) s->freeze();
    }
  } else {
    stats_.echoes_clear++;
    if (paused_) {
      paused_ = false;
      for (auto& [id, s] : members_) s->thaw();
    }
  }
}

void CqcnPairController::send_probe() {
  Packet p;
  p.src = src_;
  p.dst = dst_;
  p.kind = PktKind::kProbe;
  p.size = cfg_.probe_bytes;
  p.priority_class = 0;  // rides the foreground queue to sense its depth
  p.ecn_capable = true;
  p.probe_seq = probe_seq_++;
  p.sent_at = ctx_.now();
  ctx_.emit_from(src_, std::move(p));
  stats_.probes_sent++;
  uint64_t e = probe_epoch_;
  ctx_.schedule_in(cfg_.probe_interval, [this, e] {
    if (e == probe_epoch_) send_probe();
  });
}

}  // namespace priosim
