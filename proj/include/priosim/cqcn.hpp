#ifndef PRIOSIM_CQCN_HPP
#define PRIOSIM_CQCN_HPP

#include <map>

#include "priosim/tcp.hpp"

namespace priosim {

// Probe-gated pause controller for one (src, dst) host pair. While any
// member flow is live it keeps a tiny ECN-capable probe train running in the
// high-priority queue; a marked echo means the shared path is congested with
// foreground traffic, so every member sender is frozen in place until a
// clean echo comes back. Senders keep their entire state across the pause.
class CqcnPairController {
 public:
  struct Stats {
    uint64_t probes_sent = 0;
    uint64_t echoes_marked = 0;
    uint64_t echoes_clear = 0;
    uint64_t pauses = 0;
  };

  CqcnPairController(SimContext& ctx, NodeId src, NodeId dst,
                     const TcpConfig& cfg)
      : ctx_(ctx), src_(src), dst_(dst), cfg_(cfg) {}

  void add_member(FlowId f, TcpSender* s);
  void remove_member(FlowId f);
  void on_echo(bool marked);

  bool paused() const { return paused_; }
  size_t member_count() const { return members_.size(); }
  const Stats& stats() const { return stats_; }
  NodeId src() const { return src_; }
  NodeId dst() const { return dst_; }

 private:
  void send_probe();

  SimContext& ctx_;
  NodeId src_;
  NodeId dst_;
  TcpConfig cfg_;

  std::map<FlowId, TcpSender*> members_;  // id order => deterministic thaw
  bool paused_ = false;
  uint64_t probe_epoch_ = 0;  // bumped to retire the pending probe event
  uint32_t probe_seq_ = 0;
  Stats stats_;
};

}  // namespace priosim

#endif
