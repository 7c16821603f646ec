#ifndef PRIOSIM_RUNNER_HPP
#define PRIOSIM_RUNNER_HPP

#include <string>
#include <vector>

#include "priosim/metrics.hpp"
#include "priosim/scenario.hpp"
#include "priosim/simulation.hpp"

namespace priosim {

// In-process execution (tests use these directly; the CLI adds files).
RunResult execute_single(const ScenarioConfig& cfg, uint64_t seed);

struct PairedOutcome {
  RunResult candidate;  // transports exactly as configured
  RunResult nearopt;    // identical, class-1 transport swapped to the oracle
  PairedResult paired;  // ratio = candidate / oracle per flow
};
PairedOutcome execute_paired(const ScenarioConfig& cfg, uint64_t seed);

// Artifact writers. Filenames follow <scenario>__<transport>__seed<k>.csv
// inside outdir (created if missing). Returns the paths written.
std::vector<std::string> write_single(const ScenarioConfig& cfg, uint64_t seed,
                                      const std::string& outdir,
                                      const RunResult& r);
std::vector<std::string> write_paired(const ScenarioConfig& cfg, uint64_t seed,
                                      const std::string& outdir,
                                      const PairedOutcome& po);

// Parameter sweep: a base config plus named axes of override values.
//
//   [sweep]
//   base = default.conf        # path, relative to the sweep file
//   mode = paired              # run | paired
//   seeds = 1 2 3
//   [axes]
//   transport.1.rto_min_ns = 500000;1000000;5000000;10000000
//
// Every axis key must already exist in the base config. One run per grid
// point per seed; an index.csv maps grid points to output files.
struct SweepSpec {
  ConfigFile base;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::vector<uint64_t> seeds;
  bool paired = false;

  static SweepSpec load(const std::string& path);
  size_t grid_points() const;
};

// Executes the sweep, writes artifacts plus index.csv, returns its path.
std::string run_sweep(const SweepSpec& spec, const std::string& outdir,
                      unsigned jobs);

}  // namespace priosim

#endif
