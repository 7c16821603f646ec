#ifndef PRIOSIM_METRICS_HPP
#define PRIOSIM_METRICS_HPP

#include <map>
#include <string>
#include <vector>

#include "priosim/flow_spec.hpp"
#include "priosim/sim_context.hpp"

namespace priosim {

enum class SizeClass : uint8_t { kSmall, kMedium, kLong };

// Decimal thresholds: <50KB small, 50KB..1MB medium, >1MB long.
SizeClass classify_size(uint64_t bytes);
const char* size_class_name(SizeClass c);

struct FlowRecord {
  FlowId id = 0;
  uint64_t size = 0;
  uint8_t cls = 0;
  SizeClass size_class = SizeClass::kSmall;
  SimTime arrival = 0;
  SimTime completion = 0;
  SimTime fct = 0;
  uint64_t pkts_sent = 0;
  uint64_t retx = 0;
  uint64_t spurious = 0;

  double retx_rate() const {
    return pkts_sent ? double(retx) / double(pkts_sent) : 0.0;
  }
};

// Nearest-rank percentile over an ascending-sorted sample vector:
// the element at rank ceil(p/100 * n), 1-based. p in (0, 100].
double percentile_sorted(const std::vector<double>& sorted, double p);
double percentile(std::vector<double> samples, double p);  // sorts a copy

// Per-run flow bookkeeping. Flows that never complete are censored: they
// stay out of the FCT samples and are only counted.
class MetricsCollector {
 public:
  void on_arrival(const FlowSpec& f);
  void on_completion(FlowId f, const FlowStats& st, SimTime now);

  bool is_complete(FlowId f) const { return done_.count(f) != 0; }
  const std::map<FlowId, FlowRecord>& completed() const { return done_; }
  uint64_t arrived_count() const { return arrived_.size(); }
  uint64_t censored_count() const { return arrived_.size() - done_.size(); }
  const std::map<FlowId, FlowSpec>& arrivals() const { return arrived_; }

 private:
  std::map<FlowId, FlowSpec> arrived_;
  std::map<FlowId, FlowRecord> done_;
};

struct PairedFlow {
  FlowId id = 0;
  uint64_t size = 0;
  uint8_t cls = 0;
  SizeClass size_class = SizeClass::kSmall;
  SimTime fct_a = 0;
  SimTime fct_b = 0;
  double ratio = 0.0;  // fct_a / fct_b
};

struct PairedResult {
  std::vector<PairedFlow> flows;  // ascending flow id
  uint64_t only_a = 0;            // completed in run A alone
  uint64_t only_b = 0;
};

// Joins two runs of the identical trace by flow id. Throws ConfigError if
// the two runs did not consume the same arrivals.
PairedResult normalize_paired(const MetricsCollector& a,
                              const MetricsCollector& b);

// ----- file emission (deterministic bytes) ---------------------------------
void write_flow_csv(const std::string& path,
                    const std::map<FlowId, FlowRecord>& records);
void write_cdf_file(const std::string& path, std::vector<double> samples);
void write_paired_csv(const std::string& path, const PairedResult& pr);

struct LinkUtilRow {
  std::string link;
  SimTime busy_ns = 0;
  SimTime elapsed_ns = 0;
};
void write_util_csv(const std::string& path,
                    const std::vector<LinkUtilRow>& rows);

// Grouped FCT/retx digest: one row per (priority class, size class).
void write_summary_csv(const std::string& path, const std::string& scenario,
                       const std::string& transport,
                       const std::map<FlowId, FlowRecord>& records,
                       uint64_t censored);

}  // namespace priosim

#endif
