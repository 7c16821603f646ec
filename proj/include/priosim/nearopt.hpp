#ifndef PRIOSIM_NEAROPT_HPP
#define PRIOSIM_NEAROPT_HPP

#include <deque>
#include <map>

#include "priosim/flow_spec.hpp"
#include "priosim/link_tracker.hpp"
#include "priosim/loss_ledger.hpp"
#include "priosim/packet.hpp"
#include "priosim/sim_context.hpp"

namespace priosim {

// Omniscient reference transport. No probing, no windows: every packet is
// paced at the min fair rate over the flow's path, a new flow starts at that
// rate immediately, and a timer validates suspected losses against the
// global drop ledger, so it retransmits exactly the segments the fabric
// dropped and nothing else. Retransmissions cut to the head of the paced
// stream.
class NearOptSender {
 public:
  struct Config {
    uint32_t mss = 1460;
    uint32_t header_bytes = 40;
    SimTime check_interval = 200 * kUsec;  // loss-validation timer
  };

  NearOptSender(SimContext& ctx, const FlowSpec& spec, const Config& cfg,
                const LossLedger* ledger, LinkLoadTracker* up,
                LinkLoadTracker* down);

  void start();
  void on_ack(const Packet& ack);

  // Called by trackers after every rate refresh. Settles the pacing debt at
  // the old rate and re-plans the pending emission at the new one, waking a
  // sender that slept on a zero rate. Idempotent.
  void on_rate_change();

  double rate_bps() const;
  const FlowStats& stats() const { return stats_; }
  bool done() const { return done_; }

 private:
  struct Seg {
    uint64_t end;
    uint32_t claimed = 0;  // ledger drops already answered with a retx
    bool in_retx_q = false;
  };

  bool work_pending() const;
  void emit_next();
  void settle();
  void plan();
  void on_check();
  void send_range(uint64_t s, uint64_t e, bool retx);
  void finish();

  SimContext& ctx_;
  FlowSpec spec_;
  Config cfg_;
  const LossLedger* ledger_;
  LinkLoadTracker* up_;
  LinkLoadTracker* down_;
  uint8_t qcls_;

  std::map<uint64_t, Seg> unacked_;
  std::deque<std::pair<uint64_t, uint64_t>> retx_q_;
  uint64_t next_new_ = 0;
  uint64_t cum_acked_ = 0;
  // Fluid pacing: each sent packet leaves a serialization debt in bits that
  // drains at the fair rate; the next emission fires once it reaches zero.
  double owe_bits_ = 0.0;
  double plan_rate_ = 0.0;
  SimTime plan_start_ = 0;
  bool emit_scheduled_ = false;
  bool suspended_ = false;
  bool done_ = false;
  uint64_t emit_epoch_ = 0;
  uint64_t timer_epoch_ = 0;
  FlowStats stats_;
};

}  // namespace priosim

#endif
