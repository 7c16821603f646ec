#ifndef PRIOSIM_TCP_HPP
#define PRIOSIM_TCP_HPP

#include <cmath>
#include <deque>
#include <map>
#include <vector>

#include "priosim/flow_spec.hpp"
#include "priosim/loss_ledger.hpp"
#include "priosim/packet.hpp"
#include "priosim/sim_context.hpp"

namespace priosim {

enum class CcAlgo : uint8_t { kNewReno, kCubic };

// Low-priority congestion-control overlays riding on the same reliability
// chassis. kFreeze is the probe-gated mode: a pair controller pauses and
// resumes the sender around high-priority bursts.
enum class LpFlavor : uint8_t { kNone, kLedbat, kTcpLp, kFreeze };

struct TcpConfig {
  CcAlgo cc = CcAlgo::kCubic;
  bool sack = true;
  LpFlavor flavor = LpFlavor::kNone;

  uint32_t mss = 1460;
  uint32_t header_bytes = 40;
  uint32_t ack_bytes = 40;
  uint32_t iw_pkts = 2;

  SimTime rto_min = 1 * kMsec;
  SimTime rto_max = 60 * kSec;
  SimTime rto_initial = 1 * kMsec;

  uint64_t sndbuf = 1 << 20;
  uint64_t rcvbuf = 1 << 20;

  double cubic_c = 0.4;
  double cubic_beta = 0.7;
  bool cubic_friendly = true;   // standard Reno-tracking floor
  bool cubic_fast_conv = true;

  SimTime ledbat_target = 3200 * kUsec;
  double ledbat_gain = 1.0;

  double tcplp_delta = 0.15;

  SimTime probe_interval = 100 * kUsec;  // kFreeze pair prober
  uint32_t probe_bytes = 64;
};

// srtt/rttvar estimator, RFC 6298 shape with integer-ns state.
struct RttEstimator {
  SimTime srtt = 0;
  SimTime rttvar = 0;
  bool valid = false;

  void sample(SimTime s) {
    if (!valid) {
      srtt = s;
      rttvar = s / 2;
      valid = true;
      return;
    }
    SimTime err = srtt > s ? srtt - s : s - srtt;
    rttvar = (3 * rttvar + err) / 4;
    srtt = (7 * srtt + s) / 8;
  }
};

inline SimTime compute_rto(const RttEstimator& e, SimTime rto_min,
                           SimTime rto_max, SimTime initial) {
  SimTime raw = e.valid ? e.srtt + 4 * e.rttvar : initial;
  if (raw < rto_min) raw = rto_min;
  if (raw > rto_max) raw = rto_max;
  return raw;
}

// Window curve state. Windows are tracked in MSS units, time in seconds;
// w(t) = c (t - k)^3 + w_max, so w(k) == w_max identically.
struct CubicState {
  double c = 0.4;
  double beta = 0.7;
  double w_max = 0.0;     // MSS
  double k = 0.0;         // seconds
  SimTime epoch_start = -1;

  double window_mss(double t_sec) const {
    double d = t_sec - k;
    return c * d * d * d + w_max;
  }
};

enum class TcpPhase : uint8_t { kOpen, kFastRecovery, kRtoRecovery };

class TcpSender {
 public:
  struct State {
    double cwnd = 0;        // bytes
    double ssthresh = 0;    // bytes
    TcpPhase phase = TcpPhase::kOpen;
    RttEstimator rtt;
    uint32_t dup_acks = 0;
    uint64_t highest_acked = 0;
    uint64_t next_seq = 0;
    uint64_t recover_point = 0;
    uint32_t backoff = 0;  // consecutive-timeout exponent
    uint32_t protocol_faults = 0;
    CubicState cubic;
    // ledbat
    SimTime base_owd = INT64_MAX;
    // tcp-lp
    SimTime lp_smooth = -1;
    SimTime lp_min = INT64_MAX;
    SimTime lp_max = INT64_MIN;
    SimTime lp_inference_until = -1;
  };

  TcpSender(SimContext& ctx, const FlowSpec& spec, const TcpConfig& cfg,
            const LossLedger* ledger);

  void start();
  void on_ack(const Packet& ack);

  // Pair-controller hooks (kFreeze): suspend everything, resume exactly
  // where we left off. While frozen nothing is sent, no timer can fire and
  // arriving acks are parked untouched.
  void freeze();
  void thaw();
  bool frozen() const { return frozen_; }

  const State& st() const { return st_; }
  const FlowStats& stats() const { return stats_; }
  const FlowSpec& spec() const { return spec_; }
  bool done() const { return done_; }
  SimTime effective_rto() const;
  uint64_t scoreboard_hash() const;
  uint64_t pipe_bytes() const { return pipe_; }

 private:
  struct Seg {
    uint64_t end;
    bool sacked = false;
    bool in_flight = false;
    bool retx_ever = false;
    bool retx_episode = false;  // resent in the current recovery episode
  };

  struct AckInfo {
    uint64_t cum = 0;
    uint8_t nblocks = 0;
    std::array<SackBlock, 3> blocks{};
    SimTime echo_sent_at = 0;
    bool echo_retx = false;
    SimTime owd = 0;
    SimTime arrival = 0;
  };

  void process_ack(const AckInfo& a);
  void on_cum_advance(const AckInfo& a, uint64_t bytes_acked);
  void grow_open(const AckInfo& a, uint64_t bytes_acked);
  void cubic_on_ack();
  void ledbat_on_ack(const AckInfo& a);
  void tcplp_on_ack(const AckInfo& a);
  void enter_fast_recovery();
  void cc_loss_event();
  void sack_update(const AckInfo& a);
  void mark_lost_below_sack();
  void on_rto();
  void restart_timer();
  void stop_timer();
  void try_send();
  void send_new(uint64_t s, uint64_t e);
  void resend(uint64_t s, Seg& seg);
  void retransmit_head();
  void finish();
  double send_window() const;
  uint8_t qcls() const { return ctx_.queue_class(spec_.priority_class); }
  Packet make_data(uint64_t s, uint64_t e, bool retx) const;

  SimContext& ctx_;
  FlowSpec spec_;
  TcpConfig cfg_;
  RetxClassifier classifier_;

  State st_;
  std::map<uint64_t, Seg> unacked_;
  uint64_t pipe_ = 0;               // bytes believed in flight
  uint64_t highest_sacked_end_ = 0;
  FlowStats stats_;
  bool done_ = false;

  // retransmission timer
  uint64_t timer_epoch_ = 0;
  SimTime timer_deadline_ = 0;
  bool timer_armed_ = false;

  // freeze/thaw
  bool frozen_ = false;
  SimTime frozen_remaining_ = -1;
  std::vector<AckInfo> deferred_;
};

// Receiver half: reassembly ranges plus immediate ack per data packet. The
// ack carries the cumulative offset, up to three out-of-order blocks and the
// delivered packet's send timestamp (echo) for RTT/one-way-delay samples.
class TcpReceiver {
 public:
  TcpReceiver(SimContext& ctx, const FlowSpec& spec, const TcpConfig& cfg)
      : ctx_(ctx), spec_(spec), cfg_(cfg) {}

  void on_data(const Packet& p);
  uint64_t cum() const { return cum_; }
  uint64_t delivered_bytes() const;

 private:
  struct Range {
    uint64_t end;
    uint64_t stamp;  // recency of last touch; newest ranges are reported first
  };
  SimContext& ctx_;
  FlowSpec spec_;
  TcpConfig cfg_;
  std::map<uint64_t, Range> ranges_;  // disjoint [start, end)
  uint64_t cum_ = 0;
  uint64_t stamp_ = 0;
};

}  // namespace priosim

#endif
