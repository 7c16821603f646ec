#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "priosim/runner.hpp"

using namespace priosim;

namespace {

std::string default_out() {
  const char* env = std::getenv("PRIOSIM_OUT");
  return env && *env ? env : ".";
}

ScenarioConfig load_scenario(const std::string& path, int64_t seed_flag) {
  ScenarioConfig sc = ScenarioConfig::from_file(ConfigFile::parse_file(path));
  if (seed_flag >= 0) sc.seed = uint64_t(seed_flag);
  auto viol = sc.validate();
  if (!viol.empty()) {
    std::string msg = "invalid scenario `" + path + "`:";
    for (auto& v : viol) msg += "\n  " + v;
    throw ConfigError(msg);
  }
  return sc;
}

void print_digest(const RunResult& r) {
  std::cout << "  completed " << r.metrics.completed().size() << " / "
            << r.metrics.arrived_count() << " flows ("
            << r.metrics.censored_count() << " censored), " << r.data_drops
            << " data drops, " << r.dispatched << " events, t_end "
            << r.ended_at << " ns\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"priority-fabric flow simulator"};
  app.require_subcommand(1);

  std::string cfg_path, spec_path;
  std::string out = default_out();
  int64_t seed = -1;
  unsigned jobs = 1;

  auto* v = app.add_subcommand("validate", "check a scenario config");
  v->add_option("config", cfg_path, "scenario config file")->required();

  auto* r = app.add_subcommand("run", "execute one scenario");
  r->add_option("config", cfg_path, "scenario config file")->required();
  r->add_option("--seed", seed, "override [run] seed");
  r->add_option("--out", out, "output directory (or $PRIOSIM_OUT)");

  auto* p = app.add_subcommand(
      "paired", "run candidate and oracle transports on one trace");
  p->add_option("config", cfg_path, "scenario config file")->required();
  p->add_option("--seed", seed, "override [run] seed");
  p->add_option("--out", out, "output directory (or $PRIOSIM_OUT)");

  auto* s = app.add_subcommand("sweep", "run a parameter grid");
  s->add_option("spec", spec_path, "sweep spec file")->required();
  s->add_option("--jobs", jobs, "concurrent grid points");
  s->add_option("--out", out, "output directory (or $PRIOSIM_OUT)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (v->parsed()) {
      ScenarioConfig sc =
          ScenarioConfig::from_file(ConfigFile::parse_file(cfg_path));
      auto viol = sc.validate();
      if (!viol.empty()) {
        for (auto& msg : viol) std::cerr << msg << "\n";
        return 1;
      }
      std::cout << "ok\n";
      return 0;
    }
    if (r->parsed()) {
      ScenarioConfig sc = load_scenario(cfg_path, seed);
      RunResult res = execute_single(sc, sc.seed);
      for (auto& path : write_single(sc, sc.seed, out, res))
        std::cout << path << "\n";
      print_digest(res);
      return 0;
    }
    if (p->parsed()) {
      ScenarioConfig sc = load_scenario(cfg_path, seed);
      PairedOutcome po = execute_paired(sc, sc.seed);
      for (auto& path : write_paired(sc, sc.seed, out, po))
        std::cout << path << "\n";
      std::cout << "candidate:\n";
      print_digest(po.candidate);
      std::cout << "oracle:\n";
      print_digest(po.nearopt);
      std::cout << "  paired " << po.paired.flows.size() << " flows, only_a "
                << po.paired.only_a << ", only_b " << po.paired.only_b << "\n";
      return 0;
    }
    if (s->parsed()) {
      SweepSpec spec = SweepSpec::load(spec_path);
      std::string index = run_sweep(spec, out, jobs);
      std::cout << index << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
