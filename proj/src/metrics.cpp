#include "priosim/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace priosim {

SizeClass classify_size(uint64_t bytes) {
  if (bytes < 50'000) return SizeClass::kSmall;
  if (bytes <= 1'000'000) return SizeClass::kMedium;
  return SizeClass::kLong;
}

const char* size_class_name(SizeClass c) {
  switch (c) {
    case SizeClass::kSmall: return "small";
    case SizeClass::kMedium: return "medium";
    default: return "long";
  }
}

double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw SimFault("percentile over empty samples");
  if (p <= 0.0 || p > 100.0) throw SimFault("percentile p outside (0,100]");
  size_t rank = static_cast<size_t>(std::ceil(p / 100.0 * double(sorted.size())));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

double percentile(std::vector<double> samples, double p) {
  std::sort(samples.begin(), samples.end());
  return percentile_sorted(samples, p);
}

void MetricsCollector::on_arrival(const FlowSpec& f) {
  auto [it, fresh] = arrived_.emplace(f.id, f);
  (void)it;
  PSIM_CHECK(fresh, "duplicate flow arrival");
}

void MetricsCollector::on_completion(FlowId f, const FlowStats& st,
                                     SimTime now) {
  auto it = arrived_.find(f);
  PSIM_CHECK(it != arrived_.end(), "completion for unknown flow");
  PSIM_CHECK(done_.count(f) == 0, "flow completed twice");
  const FlowSpec& spec = it->second;
  FlowRecord r;
  r.id = f;
  r.size = spec.size_bytes;
  r.cls = spec.priority_class;
  r.size_class = classify_size(spec.size_bytes);
  r.arrival = spec.arrival_ns;
  r.completion = now;
  r.fct = now - spec.arrival_ns;
  PSIM_CHECK(r.fct > 0, "flow completed before it arrived");
  r.pkts_sent = st.data_pkts_sent;
  r.retx = st.retx;
  r.spurious = st.spurious_retx;
  PSIM_CHECK(r.spurious <= r.retx && r.retx <= r.pkts_sent,
             "retransmission counters inconsistent");
  done_.emplace(f, r);
}

PairedResult normalize_paired(const MetricsCollector& a,
                              const MetricsCollector& b) {
  // Both runs must have consumed the identical trace.
  if (a.arrivals().size() != b.arrivals().size())
    throw ConfigError("paired runs saw different traces (arrival counts)");
  for (auto ia = a.arrivals().begin(), ib = b.arrivals().begin();
       ia != a.arrivals().end(); ++ia, ++ib) {
    if (!(ia->second == ib->second))
      throw ConfigError("paired runs saw different traces (flow " +
                        std::to_string(ia->first) + ")");
  }
  PairedResult pr;
  for (auto& [id, ra] : a.completed()) {
    auto itb = b.completed().find(id);
    if (itb == b.completed().end()) {
      pr.only_a++;
      continue;
    }
    const FlowRecord& rb = itb->second;
    PairedFlow pf;
    pf.id = id;
    pf.size = ra.size;
    pf.cls = ra.cls;
    pf.size_class = ra.size_class;
    pf.fct_a = ra.fct;
    pf.fct_b = rb.fct;
    pf.ratio = double(ra.fct) / double(rb.fct);
    pr.flows.push_back(pf);
  }
  for (auto& [id, rb] : b.completed())
    if (!a.completed().count(id)) pr.only_b++;
  return pr;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary => identical bytes
  if (!out) throw ConfigError("cannot write file: " + path);
  return out;
}

}  // namespace

void write_flow_csv(const std::string& path,
                    const std::map<FlowId, FlowRecord>& records) {
  auto out = open_out(path);
  out << "flow_id,size,class,size_class,arrival_ns,fct_ns,retx,spurious\n";
  char buf[256];
  for (auto& [id, r] : records) {
    std::snprintf(buf, sizeof buf,
                  "%" PRIu64 ",%" PRIu64 ",%u,%s,%" PRId64 ",%" PRId64
                  ",%" PRIu64 ",%" PRIu64 "\n",
                  r.id, r.size, unsigned(r.cls), size_class_name(r.size_class),
                  r.arrival, r.fct, r.retx, r.spurious);
    out << buf;
  }
}

void write_cdf_file(const std::string& path, std::vector<double> samples) {
  auto out = open_out(path);
  std::sort(samples.begin(), samples.end());
  char buf[128];
  size_t n = samples.size();
  for (size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g\n", samples[i],
                  double(i + 1) / double(n));
    out << buf;
  }
}

void write_paired_csv(const std::string& path, const PairedResult& pr) {
  auto out = open_out(path);
  out << "flow_id,size,class,size_class,fct_a_ns,fct_b_ns,ratio\n";
  char buf[256];
  for (const PairedFlow& f : pr.flows) {
    std::snprintf(buf, sizeof buf,
                  "%" PRIu64 ",%" PRIu64 ",%u,%s,%" PRId64 ",%" PRId64
                  ",%.9g\n",
                  f.id, f.size, unsigned(f.cls), size_class_name(f.size_class),
                  f.fct_a, f.fct_b, f.ratio);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# only_a=%" PRIu64 " only_b=%" PRIu64 "\n",
                pr.only_a, pr.only_b);
  out << buf;
}

void write_util_csv(const std::string& path,
                    const std::vector<LinkUtilRow>& rows) {
  auto out = open_out(path);
  out << "link,busy_ns,elapsed_ns,utilization\n";
  char buf[256];
  for (const LinkUtilRow& r : rows) {
    double u = r.elapsed_ns > 0 ? double(r.busy_ns) / double(r.elapsed_ns) : 0;
    std::snprintf(buf, sizeof buf, "%s,%" PRId64 ",%" PRId64 ",%.9g\n",
                  r.link.c_str(), r.busy_ns, r.elapsed_ns, u);
    out << buf;
  }
}

void write_summary_csv(const std::string& path, const std::string& scenario,
                       const std::string& transport,
                       const std::map<FlowId, FlowRecord>& records,
                       uint64_t censored) {
  auto out = open_out(path);
  out << "scenario,transport,class,size_class,n,avg_fct_ns,p50_fct_ns,"
         "p99_fct_ns,p999_fct_ns,avg_retx_rate,p80_retx_rate,censored\n";
  // group rows by (priority class, size class)
  std::map<std::pair<int, int>, std::vector<const FlowRecord*>> groups;
  for (auto& [id, r] : records)
    groups[{int(r.cls), int(r.size_class)}].push_back(&r);
  char buf[512];
  for (auto& [key, rows] : groups) {
    std::vector<double> fct, rate;
    double fct_sum = 0, rate_sum = 0;
    for (const FlowRecord* r : rows) {
      fct.push_back(double(r->fct));
      rate.push_back(r->retx_rate());
      fct_sum += double(r->fct);
      rate_sum += r->retx_rate();
    }
    std::sort(fct.begin(), fct.end());
    std::sort(rate.begin(), rate.end());
    size_t n = rows.size();
    std::snprintf(
        buf, sizeof buf, "%s,%s,%d,%s,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%" PRIu64 "\n",
        scenario.c_str(), transport.c_str(), key.first,
        size_class_name(SizeClass(key.second)), n, fct_sum / double(n),
        percentile_sorted(fct, 50), percentile_sorted(fct, 99),
        percentile_sorted(fct, 99.9), rate_sum / double(n),
        percentile_sorted(rate, 80), censored);
    out << buf;
  }
}

}  // namespace priosim
