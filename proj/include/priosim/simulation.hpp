#ifndef PRIOSIM_SIMULATION_HPP
#define PRIOSIM_SIMULATION_HPP

#include <map>
#include <memory>
#include <utility>

#include "priosim/cqcn.hpp"
#include "priosim/link_tracker.hpp"
#include "priosim/loss_ledger.hpp"
#include "priosim/metrics.hpp"
#include "priosim/nearopt.hpp"
#include "priosim/network.hpp"
#include "priosim/scenario.hpp"
#include "priosim/tcp.hpp"

namespace priosim {

struct RunResult {
  MetricsCollector metrics;
  std::vector<LinkUtilRow> utils;
  uint64_t dispatched = 0;
  uint64_t drops_total = 0;   // every queue drop, any packet kind
  uint64_t data_drops = 0;    // ledger entries (data segments only)
  uint64_t cqcn_pauses = 0;
  uint64_t frozen_sends = 0;
  SimTime ended_at = 0;
};

// One end-to-end experiment: builds the fabric from the scenario, plays a
// flow trace through the configured transports, and collects metrics.
// Single-use: construct, run once, read the result.
class Simulation : public SimContext {
 public:
  explicit Simulation(const ScenarioConfig& cfg);

  RunResult run(const Trace& trace);

  // SimContext
  SimTime now() const override { return eng_.now(); }
  EventEngine::Ticket schedule_at(SimTime t,
                                  std::function<void()> fn) override {
    return eng_.schedule_at(t, std::move(fn));
  }
  void emit_from(NodeId host, Packet&& p) override {
    net_.send_from(host, std::move(p), eng_.now());
  }
  void flow_completed(FlowId f, const FlowStats& st) override;
  uint8_t queue_class(uint8_t logical) const override {
    return cfg_.single_queue ? 0 : logical;
  }

  Network& network() { return net_; }
  EventEngine& engine() { return eng_; }
  const LossLedger& ledger() const { return ledger_; }
  const TcpSender* tcp_sender(FlowId f) const {
    auto it = tcp_tx_.find(f);
    return it == tcp_tx_.end() ? nullptr : it->second.get();
  }

 private:
  void deliver(NodeId host, Packet&& p);
  void on_drop(const DropInfo& d);
  void start_flow(FlowId id);

  ScenarioConfig cfg_;
  EventEngine eng_;
  LossLedger ledger_;
  Network net_;
  std::vector<std::unique_ptr<LinkLoadTracker>> up_trk_, down_trk_;
  MetricsCollector metrics_;
  std::map<FlowId, FlowSpec> flows_;
  std::map<FlowId, std::unique_ptr<TcpSender>> tcp_tx_;
  std::map<FlowId, std::unique_ptr<NearOptSender>> no_tx_;
  std::map<FlowId, std::unique_ptr<TcpReceiver>> rx_;
  std::map<std::pair<NodeId, NodeId>, std::unique_ptr<CqcnPairController>>
      pairs_;
  uint64_t drops_seen_ = 0;
  bool ran_ = false;
};

}  // namespace priosim

#endif
