#include "priosim/tcp.hpp"

#include <algorithm>
#include <array>

namespace priosim {

TcpSender::TcpSender(SimContext& ctx, const FlowSpec& spec,
                     const TcpConfig& cfg, const LossLedger* ledger)
    : ctx_(ctx), spec_(spec), cfg_(cfg), classifier_(ledger, spec.id) {
  PSIM_CHECK(spec_.size_bytes > 0, "flow must carry bytes");
  st_.cwnd = double(cfg_.iw_pkts) * cfg_.mss;
  st_.ssthresh = 1e18;  // no slow-start ceiling until the first loss
  st_.cubic.c = cfg_.cubic_c;
  st_.cubic.beta = cfg_.cubic_beta;
}

void TcpSender::start() { try_send(); }

double TcpSender::send_window() const {
  return std::min(st_.cwnd, double(cfg_.rcvbuf));
}

Packet TcpSender::make_data(uint64_t s, uint64_t e, bool retx) const {
  Packet p;
  p.flow = spec_.id;
  p.src = spec_.src;
  p.dst = spec_.dst;
  p.kind = PktKind::kData;
  p.size = static_cast<uint32_t>(e - s) + cfg_.header_bytes;
  p.priority_class = qcls();
  p.seq_start = s;
  p.seq_end = e;
  p.retx = retx;
  p.sent_at = ctx_.now();
  return p;
}

void TcpSender::send_new(uint64_t s, uint64_t e) {
  st_.next_seq = e;
  unacked_.emplace(s, Seg{e, false, true, false});
  pipe_ += e - s;
  stats_.data_pkts_sent++;
  if (frozen_) stats_.frozen_sends++;
  ctx_.emit_from(spec_.src, make_data(s, e, false));
}

void TcpSender::resend(uint64_t s, Seg& seg) {
  if (!seg.in_flight) {
    pipe_ += seg.end - s;
    seg.in_flight = true;
  }
  seg.retx_ever = true;
  seg.retx_episode = true;
  stats_.data_pkts_sent++;
  stats_.retx++;
  if (frozen_) stats_.frozen_sends++;
  // The drop ledger referees every retransmission: if the fabric never
  // dropped this range (it was stalled, not lost), the retx is spurious.
  bool genuine = classifier_.genuine(s, seg.end);
  if (!genuine) stats_.spurious_retx++;
#ifdef PSIM_TRACE_RTO
  fprintf(stderr, "RETX t=%ld flow=%lu seq=%lu phase=%d genuine=%d\n",
          long(ctx_.now()), (unsigned long)spec_.id, (unsigned long)s,
          int(st_.phase), int(genuine));
#endif
  ctx_.emit_from(spec_.src, make_data(s, seg.end, true));
}

void TcpSender::retransmit_head() {
  for (auto& [s, seg] : unacked_) {
    if (!seg.sacked) {
      resend(s, seg);
      return;
    }
  }
}

void TcpSender::try_send() {
  if (frozen_ || done_) return;
  double wnd = send_window();
  while (double(pipe_) < wnd) {
    bool resent = false;
    if (st_.phase == TcpPhase::kRtoRecovery ||
        (st_.phase == TcpPhase::kFastRecovery && cfg_.sack)) {
      for (auto& [s, seg] : unacked_) {
        if (!seg.sacked && !seg.in_flight) {
          resend(s, seg);
          resent = true;
          break;
        }
      }
    }
    if (resent) continue;
    if (st_.next_seq >= spec_.size_bytes) break;
    uint64_t s = st_.next_seq;
    uint64_t e = std::min<uint64_t>(s + cfg_.mss, spec_.size_bytes);
    if (e - st_.highest_acked > cfg_.sndbuf) break;
    send_new(s, e);
  }
  if (!unacked_.empty() && !timer_armed_) restart_timer();
}

void TcpSender::on_ack(const Packet& ack) {
  AckInfo a;
  a.cum = ack.ack.cum;
  a.nblocks = ack.ack.nblocks;
  a.blocks = ack.ack.blocks;
  a.echo_sent_at = ack.ack.echo_sent_at;
  a.echo_retx = ack.ack.echo_retx;
  a.owd = ack.ack.echo_owd;
  a.arrival = ctx_.now();
  if (frozen_) {
    deferred_.push_back(a);  // replayed verbatim on thaw
    return;
  }
  process_ack(a);
}

void TcpSender::process_ack(const AckInfo& a) {
  if (done_) return;
  if (a.cum > st_.next_seq) {
    st_.protocol_faults++;
    return;
  }
  if (a.echo_sent_at > 0 && !a.echo_retx)
    st_.rtt.sample(a.arrival - a.echo_sent_at);
  if (cfg_.sack) sack_update(a);
  if (a.cum > st_.highest_acked) {
    on_cum_advance(a, a.cum - st_.highest_acked);
  } else if (a.cum == st_.highest_acked && !unacked_.empty()) {
    st_.dup_acks++;
    if (st_.phase == TcpPhase::kOpen && st_.dup_acks == 3) {
      enter_fast_recovery();
    } else if (st_.phase == TcpPhase::kFastRecovery && !cfg_.sack) {
      st_.cwnd += cfg_.mss;  // classic window inflation per extra dup
    }
  }
  if (!done_) try_send();
}

void TcpSender::on_cum_advance(const AckInfo& a, uint64_t bytes_acked) {
  st_.backoff = 0;
  while (!unacked_.empty()) {
    auto it = unacked_.begin();
    if (it->second.end > a.cum) break;
    if (it->second.in_flight) pipe_ -= it->second.end - it->first;
    unacked_.erase(it);
  }
  PSIM_CHECK(unacked_.empty() || unacked_.begin()->first >= a.cum,
             "cumulative ack split a segment");
  st_.highest_acked = a.cum;
  st_.dup_acks = 0;

  if (st_.phase == TcpPhase::kFastRecovery) {
    if (a.cum >= st_.recover_point) {
      st_.phase = TcpPhase::kOpen;
      st_.cwnd = st_.ssthresh;  // deflate to the post-loss operating point
    } else if (!cfg_.sack) {
      retransmit_head();  // partial ack exposes the next hole
    } else if (!unacked_.empty() && !unacked_.begin()->second.in_flight &&
               !unacked_.begin()->second.sacked) {
      retransmit_head();  // scoreboard already holds the head out as lost
    }
  } else if (st_.phase == TcpPhase::kRtoRecovery) {
    if (a.cum >= st_.recover_point) st_.phase = TcpPhase::kOpen;
    grow_open(a, bytes_acked);
  } else {
    grow_open(a, bytes_acked);
  }

  if (st_.highest_acked >= spec_.size_bytes) {
    finish();
    return;
  }
  restart_timer();
}

void TcpSender::grow_open(const AckInfo& a, uint64_t bytes_acked) {
  if (cfg_.flavor == LpFlavor::kLedbat) {
    ledbat_on_ack(a);
    return;
  }
  if (cfg_.flavor == LpFlavor::kTcpLp) {
    tcplp_on_ack(a);
    return;
  }
  if (st_.cwnd < st_.ssthresh) {
    st_.cwnd += std::min<uint64_t>(bytes_acked, cfg_.mss);
    st_.cubic.epoch_start = -1;
  } else if (cfg_.cc == CcAlgo::kNewReno) {
    st_.cwnd += double(cfg_.mss) * cfg_.mss / st_.cwnd;
  } else {
    cubic_on_ack();
  }
  double cap = 2.0 * double(cfg_.rcvbuf);
  if (st_.cwnd > cap) st_.cwnd = cap;
}

void TcpSender::cubic_on_ack() {
  SimTime now = ctx_.now();
  CubicState& cu = st_.cubic;
  double cwnd_mss = st_.cwnd / cfg_.mss;
  if (cu.epoch_start < 0) {
    cu.epoch_start = now;
    if (cwnd_mss < cu.w_max) {
      cu.k = std::cbrt((cu.w_max - cwnd_mss) / cu.c);
    } else {
      cu.k = 0.0;
      cu.w_max = cwnd_mss;
    }
  }
  double srtt_s = st_.rtt.valid ? double(st_.rtt.srtt) / 1e9 : 0.0;
  double t = double(now - cu.epoch_start) / 1e9;
  double target = cu.window_mss(t + srtt_s);
  if (target > cwnd_mss)
    st_.cwnd += double(cfg_.mss) * (target - cwnd_mss) / cwnd_mss;
  // Reno-tracking floor keeps the curve useful at sub-ms RTTs, where the
  // pure cubic recovers far too slowly.
  if (cfg_.cubic_friendly && st_.rtt.valid && srtt_s > 0.0) {
    double w_est = cu.w_max * cu.beta +
                   (3.0 * (1.0 - cu.beta) / (1.0 + cu.beta)) * (t / srtt_s);
    if (w_est * cfg_.mss > st_.cwnd) st_.cwnd = w_est * cfg_.mss;
  }
}

void TcpSender::ledbat_on_ack(const AckInfo& a) {
  if (a.owd < st_.base_owd) st_.base_owd = a.owd;
  double q = double(a.owd - st_.base_owd);
  double target = double(cfg_.ledbat_target);
  st_.cwnd += cfg_.ledbat_gain * double(cfg_.mss) * (target - q) / target;
  if (st_.cwnd < cfg_.mss) st_.cwnd = cfg_.mss;
  double cap = 2.0 * double(cfg_.rcvbuf);
  if (st_.cwnd > cap) st_.cwnd = cap;
}

void TcpSender::tcplp_on_ack(const AckInfo& a) {
  SimTime now = ctx_.now();
  if (a.owd < st_.lp_min) st_.lp_min = a.owd;
  if (a.owd > st_.lp_max) st_.lp_max = a.owd;
  st_.lp_smooth = st_.lp_smooth < 0 ? a.owd : (7 * st_.lp_smooth + a.owd) / 8;

  bool indication =
      st_.lp_max > st_.lp_min &&
      double(st_.lp_smooth) >
          double(st_.lp_min) + cfg_.tcplp_delta * double(st_.lp_max - st_.lp_min);
  SimTime window = st_.rtt.valid ? st_.rtt.srtt : cfg_.rto_min;

  if (indication) {
    bool in_inference =
        st_.lp_inference_until >= 0 && now < st_.lp_inference_until;
    if (in_inference) {
      st_.cwnd = cfg_.mss;  // persistent congestion: back off to the floor
    } else {
      st_.cwnd = std::max(st_.cwnd / 2.0, double(cfg_.mss));
    }
    st_.lp_inference_until = now + window;
  } else if (st_.lp_inference_until < 0 || now >= st_.lp_inference_until) {
    st_.cwnd += double(cfg_.mss) * cfg_.mss / st_.cwnd;
  }
}

void TcpSender::enter_fast_recovery() {
  st_.recover_point = st_.next_seq;
  cc_loss_event();
  st_.phase = TcpPhase::kFastRecovery;
  for (auto& [s, seg] : unacked_) seg.retx_episode = false;
  if (cfg_.sack) mark_lost_below_sack();
  retransmit_head();
}

void TcpSender::cc_loss_event() {
  double floor2 = 2.0 * cfg_.mss;
  if (cfg_.cc == CcAlgo::kCubic && cfg_.flavor != LpFlavor::kLedbat &&
      cfg_.flavor != LpFlavor::kTcpLp) {
    CubicState& cu = st_.cubic;
    double cwnd_mss = st_.cwnd / cfg_.mss;
    if (cfg_.cubic_fast_conv && cwnd_mss < cu.w_max)
      cu.w_max = cwnd_mss * (1.0 + cu.beta) / 2.0;
    else
      cu.w_max = cwnd_mss;
    cu.epoch_start = -1;
    st_.ssthresh = std::max(st_.cwnd * cu.beta, floor2);
  } else {
    st_.ssthresh = std::max(st_.cwnd / 2.0, floor2);
  }
  st_.cwnd = st_.ssthresh;
  if (!cfg_.sack) st_.cwnd += 3.0 * cfg_.mss;
}

void TcpSender::sack_update(const AckInfo& a) {
  // Overlapping or duplicate blocks union together naturally; only whole
  // segments get marked, matching the sender's packetization.
  for (uint8_t i = 0; i < a.nblocks; ++i) {
    const SackBlock& b = a.blocks[i];
    if (b.end <= b.start) continue;
    if (b.end > highest_sacked_end_) highest_sacked_end_ = b.end;
    for (auto it = unacked_.lower_bound(b.start);
         it != unacked_.end() && it->second.end <= b.end; ++it) {
      Seg& seg = it->second;
      if (!seg.sacked) {
        seg.sacked = true;
        if (seg.in_flight) {
          pipe_ -= seg.end - it->first;
          seg.in_flight = false;
        }
      }
    }
  }
  if (st_.phase == TcpPhase::kFastRecovery) mark_lost_below_sack();
}

void TcpSender::mark_lost_below_sack() {
  // Three segments' worth of SACKed data above a hole implies the hole is a
  // loss, not reordering. A segment already resent this episode stays out of
  // the pipeline until the episode ends or its timer fires; re-marking it on
  // every ack would loop retransmissions forever.
  for (auto& [s, seg] : unacked_) {
    if (s >= highest_sacked_end_) break;
    if (!seg.sacked && seg.in_flight && !seg.retx_episode &&
        seg.end + 3ull * cfg_.mss <= highest_sacked_end_) {
      seg.in_flight = false;
      pipe_ -= seg.end - s;
    }
  }
}

SimTime TcpSender::effective_rto() const {
  SimTime base =
      compute_rto(st_.rtt, cfg_.rto_min, cfg_.rto_max, cfg_.rto_initial);
  SimTime r = base << st_.backoff;
  if (r > cfg_.rto_max || r <= 0) r = cfg_.rto_max;
  return r;
}

void TcpSender::restart_timer() {
  timer_deadline_ = ctx_.now() + effective_rto();
  timer_armed_ = true;
  uint64_t e = ++timer_epoch_;
  ctx_.schedule_at(timer_deadline_, [this, e] {
    if (e == timer_epoch_ && timer_armed_ && !frozen_) on_rto();
  });
}

void TcpSender::stop_timer() {
  timer_armed_ = false;
  timer_epoch_++;
}

void TcpSender::on_rto() {
  if (done_ || frozen_) return;
  if (unacked_.empty()) {
    timer_armed_ = false;
    return;
  }
#ifdef PSIM_TRACE_RTO
  fprintf(stderr, "RTO t=%ld flow=%lu cwnd=%.0f srtt=%ld rttvar=%ld rto=%ld backoff=%u unacked=%zu\n",
          long(ctx_.now()), (unsigned long)spec_.id, st_.cwnd, long(st_.rtt.srtt),
          long(st_.rtt.rttvar), long(effective_rto()), st_.backoff, unacked_.size());
#endif
  if (cfg_.cc == CcAlgo::kCubic && cfg_.flavor != LpFlavor::kLedbat &&
      cfg_.flavor != LpFlavor::kTcpLp) {
    CubicState& cu = st_.cubic;
    double cwnd_mss = st_.cwnd / cfg_.mss;
    if (cfg_.cubic_fast_conv && cwnd_mss < cu.w_max)
      cu.w_max = cwnd_mss * (1.0 + cu.beta) / 2.0;
    else
      cu.w_max = cwnd_mss;
    cu.epoch_start = -1;
  }
  st_.ssthresh = std::max(st_.cwnd / 2.0, 2.0 * double(cfg_.mss));
  st_.cwnd = cfg_.mss;
  st_.phase = TcpPhase::kRtoRecovery;
  st_.recover_point = st_.next_seq;
  if (st_.backoff < 16) st_.backoff++;
  st_.dup_acks = 0;
  // Everything unSACKed is presumed lost; the window re-sends it in order.
  pipe_ = 0;
  for (auto& [s, seg] : unacked_) {
    seg.in_flight = false;
    seg.retx_episode = false;
  }
  timer_armed_ = false;
  try_send();  // retransmits the earliest hole and re-arms with backoff
}

void TcpSender::freeze() {
  if (frozen_ || done_) return;
  frozen_ = true;
  if (timer_armed_) {
    frozen_remaining_ = timer_deadline_ - ctx_.now();
    if (frozen_remaining_ < 0) frozen_remaining_ = 0;
    timer_epoch_++;  // pending expiry event goes stale
  } else {
    frozen_remaining_ = -1;
  }
}

void TcpSender::thaw() {
  if (!frozen_ || done_) return;
  frozen_ = false;
  if (timer_armed_ && frozen_remaining_ >= 0) {
    // Resume the clock with whatever time the timer had left.
    timer_deadline_ = ctx_.now() + frozen_remaining_;
    uint64_t e = ++timer_epoch_;
    ctx_.schedule_at(timer_deadline_, [this, e] {
      if (e == timer_epoch_ && timer_armed_ && !frozen_) on_rto();
    });
  }
  frozen_remaining_ = -1;
  std::vector<AckInfo> pending;
  pending.swap(deferred_);
  for (auto& a : pending) {
    if (done_ || frozen_) break;  // a replayed ack can re-freeze via overlay
    process_ack(a);
  }
  if (!done_ && !frozen_) try_send();
}

void TcpSender::finish() {
  done_ = true;
  stop_timer();
  ctx_.flow_completed(spec_.id, stats_);
}

uint64_t TcpSender::scoreboard_hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  for (auto& [s, seg] : unacked_) {
    mix(s);
    mix(seg.end);
    mix(seg.sacked ? 1 : 0);
  }
  return h;
}

void TcpReceiver::on_data(const Packet& p) {
  PSIM_CHECK(p.seq_end > p.seq_start, "empty data segment");
  uint64_t s = p.seq_start, e = p.seq_end;
  auto it = ranges_.upper_bound(s);
  if (it != ranges_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.end >= s) {
      s = prev->first;
      e = std::max(e, prev->second.end);
      ranges_.erase(prev);
    }
  }
  while (it != ranges_.end() && it->first <= e) {
    e = std::max(e, it->second.end);
    it = ranges_.erase(it);
  }
  ranges_[s] = Range{e, ++stamp_};
  if (ranges_.begin()->first == 0) cum_ = ranges_.begin()->second.end;

  Packet ack;
  ack.flow = spec_.id;
  ack.src = spec_.dst;
  ack.dst = spec_.src;
  ack.kind = PktKind::kAck;
  ack.size = cfg_.ack_bytes;
  ack.priority_class = ctx_.queue_class(spec_.priority_class);
  ack.ack.cum = cum_;
  // Report the most recently touched ranges first so the peer always learns
  // about fresh arrivals, even when more holes exist than block slots.
  std::array<const std::pair<const uint64_t, Range>*, 3> pick{};
  uint8_t n = 0;
  for (auto& r : ranges_) {
    if (r.second.end <= cum_) continue;
    uint8_t slot = n < 3 ? n : 3;
    if (slot == 3) {  // evict the oldest of the current picks if older
      uint8_t oldest = 0;
      for (uint8_t i = 1; i < 3; ++i)
        if (pick[i]->second.stamp < pick[oldest]->second.stamp) oldest = i;
      if (pick[oldest]->second.stamp < r.second.stamp) pick[oldest] = &r;
      continue;
    }
    pick[slot] = &r;
    n++;
  }
  std::sort(pick.begin(), pick.begin() + n,
            [](auto* a, auto* b) { return a->second.stamp > b->second.stamp; });
  for (uint8_t i = 0; i < n; ++i)
    ack.ack.blocks[i] = SackBlock{pick[i]->first, pick[i]->second.end};
  ack.ack.nblocks = n;
  ack.ack.echo_sent_at = p.sent_at;
  ack.ack.echo_retx = p.retx;
  ack.ack.echo_owd = ctx_.now() - p.sent_at;
  ack.sent_at = ctx_.now();
  ctx_.emit_from(spec_.dst, std::move(ack));
}

uint64_t TcpReceiver::delivered_bytes() const {
  uint64_t total = 0;
  for (auto& [s, r] : ranges_) total += r.end - s;
  return total;
}

}  // namespace priosim
