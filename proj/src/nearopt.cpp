#include "priosim/nearopt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace priosim {

NearOptSender::NearOptSender(SimContext& ctx, const FlowSpec& spec,
                             const Config& cfg, const LossLedger* ledger,
                             LinkLoadTracker* up, LinkLoadTracker* down)
    : ctx_(ctx),
      spec_(spec),
      cfg_(cfg),
      ledger_(ledger),
      up_(up),
      down_(down),
      qcls_(ctx.queue_class(spec.priority_class)) {
  PSIM_CHECK(spec_.size_bytes > 0, "flow must carry bytes");
}

double NearOptSender::rate_bps() const {
  return std::min(up_->fair_rate_bps(qcls_), down_->fair_rate_bps(qcls_));
}

void NearOptSender::start() {
  up_->register_flow(qcls_, spec_.id, this);
  down_->register_flow(qcls_, spec_.id, this);
  uint64_t e = timer_epoch_;
  ctx_.schedule_in(cfg_.check_interval, [this, e] {
    if (e == timer_epoch_) on_check();
  });
  plan();
}

bool NearOptSender::work_pending() const {
  return !retx_q_.empty() || next_new_ < spec_.size_bytes;
}

// Credits elapsed time against the outstanding pacing debt at the rate the
// current plan was made with.
void NearOptSender::settle() {
  SimTime now = ctx_.now();
  if (plan_rate_ > 0.0 && now > plan_start_)
    owe_bits_ -= double(now - plan_start_) * plan_rate_ / 1e9;
  if (owe_bits_ < 0.0) owe_bits_ = 0.0;
  plan_start_ = now;
}

// (Re)schedules the next emission under the current fair rate. Any earlier
// pending emission is orphaned via the epoch bump, so a rate change mid-gap
// always re-derives the residual wait from the remaining debt.
void NearOptSender::plan() {
  if (done_) return;
  emit_epoch_++;
  plan_start_ = ctx_.now();
  if (!work_pending()) {
    emit_scheduled_ = false;
    suspended_ = false;
    plan_rate_ = 0.0;
    return;
  }
  double r = rate_bps();
  plan_rate_ = r;
  if (r <= 0.0) {
    suspended_ = true;
    emit_scheduled_ = false;
    return;
  }
  suspended_ = false;
  emit_scheduled_ = true;
  SimTime gap = 0;
  if (owe_bits_ > 0.0) {
    gap = static_cast<SimTime>(std::ceil(owe_bits_ * 1e9 / r));
    if (gap < 1) gap = 1;
  }
  uint64_t e = emit_epoch_;
  ctx_.schedule_in(gap, [this, e] {
    if (e != emit_epoch_ || done_) return;
    settle();
    owe_bits_ = 0.0;
    emit_scheduled_ = false;
    emit_next();
  });
}

void NearOptSender::send_range(uint64_t s, uint64_t e, bool retx) {
  Packet p;
  p.flow = spec_.id;
  p.src = spec_.src;
  p.dst = spec_.dst;
  p.kind = PktKind::kData;
  p.priority_class = qcls_;
  p.seq_start = s;
  p.seq_end = e;
  p.size = static_cast<uint32_t>(e - s) + cfg_.header_bytes;
  p.retx = retx;
  p.sent_at = ctx_.now();
  stats_.data_pkts_sent++;
  if (retx) stats_.retx++;
  ctx_.emit_from(spec_.src, std::move(p));
}

void NearOptSender::emit_next() {
  if (done_) return;
  // Head-of-line retransmissions first; skip entries acked in the meantime.
  while (!retx_q_.empty()) {
    auto [s, e] = retx_q_.front();
    auto it = unacked_.find(s);
    if (it == unacked_.end() || it->second.end != e) {
      retx_q_.pop_front();
      continue;
    }
    retx_q_.pop_front();
    it->second.in_retx_q = false;
    send_range(s, e, true);
    owe_bits_ += double((e - s + cfg_.header_bytes) * 8);
    plan();
    return;
  }
  if (next_new_ < spec_.size_bytes) {
    uint64_t s = next_new_;
    uint64_t e = std::min<uint64_t>(s + cfg_.mss, spec_.size_bytes);
    next_new_ = e;
    unacked_.emplace(s, Seg{e, 0, false});
    send_range(s, e, false);
    owe_bits_ += double((e - s + cfg_.header_bytes) * 8);
    plan();
    return;
  }
  // Everything sent; stay idle until an ack or the validation timer acts.
  plan();
}

void NearOptSender::on_rate_change() {
  if (done_) return;
  if (!emit_scheduled_ && !suspended_) return;  // nothing to send right now
  double r = rate_bps();
  if (emit_scheduled_ && r == plan_rate_) return;  // plan still valid
  settle();
  plan();
}

void NearOptSender::on_ack(const Packet& ack) {
  if (done_) return;
  cum_acked_ = std::max(cum_acked_, ack.ack.cum);
  // Drop acked segments: everything below cum plus any SACKed ranges.
  while (!unacked_.empty()) {
    auto it = unacked_.begin();
    if (it->second.end > ack.ack.cum) break;
    unacked_.erase(it);
  }
  for (uint8_t i = 0; i < ack.ack.nblocks; ++i) {
    const SackBlock& b = ack.ack.blocks[i];
    auto it = unacked_.lower_bound(b.start);
    while (it != unacked_.end() && it->second.end <= b.end)
      it = unacked_.erase(it);
  }
  if (cum_acked_ >= spec_.size_bytes) finish();
}

void NearOptSender::on_check() {
  if (done_) return;
  // Consult the ledger for every outstanding segment: queue a retransmission
  // per unanswered recorded drop, in sequence order, at the stream head.
  std::vector<std::pair<uint64_t, uint64_t>> lost;
  for (auto& [s, seg] : unacked_) {
    if (seg.in_retx_q) continue;
    if (ledger_->drop_count(spec_.id, s, seg.end) > seg.claimed) {
      seg.claimed++;
      seg.in_retx_q = true;
      lost.emplace_back(s, seg.end);
    }
  }
  for (auto it = lost.rbegin(); it != lost.rend(); ++it)
    retx_q_.push_front(*it);
  if (!lost.empty() && !emit_scheduled_) {
    settle();
    plan();
  }
  uint64_t e = ++timer_epoch_;
  ctx_.schedule_in(cfg_.check_interval, [this, e] {
    if (e == timer_epoch_) on_check();
  });
}

void NearOptSender::finish() {
  done_ = true;
  timer_epoch_++;  // kills the pending check timer
  up_->deregister_flow(qcls_, spec_.id);
  down_->deregister_flow(qcls_, spec_.id);
  ctx_.flow_completed(spec_.id, stats_);
}

}  // namespace priosim
