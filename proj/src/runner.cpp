#include "priosim/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace priosim {

namespace fs = std::filesystem;

RunResult execute_single(const ScenarioConfig& cfg, uint64_t seed) {
  Trace trace = cfg.make_trace(seed);
  Simulation sim(cfg);
  return sim.run(trace);
}

PairedOutcome execute_paired(const ScenarioConfig& cfg, uint64_t seed) {
  if (cfg.single_queue)
    throw ConfigError("paired runs need two priority classes");
  Trace trace = cfg.make_trace(seed);  // shared verbatim by both runs
  PairedOutcome po;
  {
    Simulation a(cfg);
    po.candidate = a.run(trace);
  }
  ScenarioConfig oracle_cfg = cfg;
  oracle_cfg.transport[1].kind = TransportKind::kNearOpt;
  {
    Simulation b(oracle_cfg);
    po.nearopt = b.run(trace);
  }
  po.paired = normalize_paired(po.candidate.metrics, po.nearopt.metrics);
  return po;
}

namespace {

std::string run_stem(const ScenarioConfig& cfg, const std::string& label,
                     uint64_t seed, const std::string& outdir) {
  return (fs::path(outdir) /
          (cfg.name + "__" + label + "__seed" + std::to_string(seed)))
      .string();
}

std::vector<std::string> write_one(const ScenarioConfig& cfg,
                                   const std::string& label, uint64_t seed,
                                   const std::string& outdir,
                                   const RunResult& r) {
  std::string stem = run_stem(cfg, label, seed, outdir);
  std::vector<std::string> paths;
  write_flow_csv(stem + ".csv", r.metrics.completed());
  paths.push_back(stem + ".csv");
  write_summary_csv(stem + ".summary.csv", cfg.name, label,
                    r.metrics.completed(), r.metrics.censored_count());
  paths.push_back(stem + ".summary.csv");
  write_util_csv(stem + ".util.csv", r.utils);
  paths.push_back(stem + ".util.csv");
  return paths;
}

}  // namespace

std::vector<std::string> write_single(const ScenarioConfig& cfg, uint64_t seed,
                                      const std::string& outdir,
                                      const RunResult& r) {
  fs::create_directories(outdir);
  return write_one(cfg, cfg.transport_label(1), seed, outdir, r);
}

std::vector<std::string> write_paired(const ScenarioConfig& cfg, uint64_t seed,
                                      const std::string& outdir,
                                      const PairedOutcome& po) {
  fs::create_directories(outdir);
  std::string cand = cfg.transport_label(1);
  std::vector<std::string> paths =
      write_one(cfg, cand, seed, outdir, po.candidate);
  for (auto& p : write_one(cfg, "nearopt", seed, outdir, po.nearopt))
    paths.push_back(p);

  std::string stem = run_stem(cfg, cand + "-vs-nearopt", seed, outdir);
  write_paired_csv(stem + ".paired.csv", po.paired);
  paths.push_back(stem + ".paired.csv");

  // Ratio distributions of the studied (low-priority) class, per size class.
  for (int sc = 0; sc < 3; ++sc) {
    std::vector<double> ratios;
    for (const PairedFlow& f : po.paired.flows)
      if (f.cls == 1 && int(f.size_class) == sc) ratios.push_back(f.ratio);
    if (ratios.empty()) continue;
    std::string p = stem + "." + size_class_name(SizeClass(sc)) + ".ratio.cdf";
    write_cdf_file(p, std::move(ratios));
    paths.push_back(p);
  }
  return paths;
}

SweepSpec SweepSpec::load(const std::string& path) {
  ConfigFile cf = ConfigFile::parse_file(path);
  SweepSpec sp;
  std::string base_rel = cf.get("sweep", "base");
  fs::path base_path = fs::path(path).parent_path() / base_rel;
  sp.base = ConfigFile::parse_file(base_path.string());
  std::string mode = cf.get_or("sweep", "mode", "run");
  if (mode == "run")
    sp.paired = false;
  else if (mode == "paired")
    sp.paired = true;
  else
    throw ConfigError("[sweep] mode: unknown `" + mode + "`");
  std::istringstream seeds_in(cf.get_or("sweep", "seeds", ""));
  for (std::string tok; std::getline(seeds_in, tok, ';');) {
    size_t b = tok.find_first_not_of(" \t");
    size_t e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    tok = tok.substr(b, e - b + 1);
    size_t used = 0;
    uint64_t s = 0;
    try {
      s = std::stoull(tok, &used);
    } catch (...) {
    }
    if (used != tok.size())
      throw ConfigError("[sweep] seeds: not an integer: " + tok);
    sp.seeds.push_back(s);
  }
  if (sp.seeds.empty()) sp.seeds.push_back(1);

  auto axes_sec = cf.sections().find("axes");
  if (axes_sec == cf.sections().end() || axes_sec->second.empty())
    throw ConfigError("[axes]: a sweep needs at least one axis");
  for (auto& [key, joined] : axes_sec->second) {
    auto dot = key.rfind('.');
    if (dot == std::string::npos)
      throw ConfigError("[axes] " + key + ": expected section.key");
    std::string sec = key.substr(0, dot), k = key.substr(dot + 1);
    if (!sp.base.has(sec, k))
      throw ConfigError("[axes] " + key + ": key not present in base config");
    std::vector<std::string> vals;
    std::istringstream in(joined);
    std::string v;
    while (std::getline(in, v, ';')) {
      size_t b = v.find_first_not_of(" \t");
      size_t e = v.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      vals.push_back(v.substr(b, e - b + 1));
    }
    if (vals.empty())
      throw ConfigError("[axes] " + key + ": no values");
    sp.axes.emplace_back(key, vals);
  }
  return sp;
}

size_t SweepSpec::grid_points() const {
  size_t n = 1;
  for (auto& [k, vals] : axes) n *= vals.size();
  return n;
}

std::string run_sweep(const SweepSpec& spec, const std::string& outdir,
                      unsigned jobs) {
  fs::create_directories(outdir);
  size_t points = spec.grid_points();

  struct Task {
    size_t point;
    uint64_t seed;
    std::string overrides;  // "k=v|k=v"
    ScenarioConfig cfg;
  };
  std::vector<Task> tasks;
  std::vector<size_t> idx(spec.axes.size(), 0);
  for (size_t p = 0; p < points; ++p) {
    ConfigFile cf = spec.base;
    std::string overrides;
    for (size_t a = 0; a < spec.axes.size(); ++a) {
      const auto& [key, vals] = spec.axes[a];
      auto dot = key.rfind('.');
      cf.set(key.substr(0, dot), key.substr(dot + 1), vals[idx[a]]);
      if (a) overrides += "|";
      overrides += key + "=" + vals[idx[a]];
    }
    ScenarioConfig sc = ScenarioConfig::from_file(cf);
    sc.name += "_p" + std::to_string(p);
    auto viol = sc.validate();
    if (!viol.empty()) {
      std::string msg = "sweep point " + std::to_string(p) + " invalid:";
      for (auto& v : viol) msg += "\n  " + v;
      throw ConfigError(msg);
    }
    for (uint64_t seed : spec.seeds)
      tasks.push_back({p, seed, overrides, sc});
    // odometer step
    for (size_t a = spec.axes.size(); a-- > 0;) {
      if (++idx[a] < spec.axes[a].second.size()) break;
      idx[a] = 0;
    }
  }

  std::vector<std::string> first_file(tasks.size());
  bool paired = spec.paired;
  auto run_task = [&](size_t i) {
    const Task& t = tasks[i];
    if (paired) {
      PairedOutcome po = execute_paired(t.cfg, t.seed);
      auto paths = write_paired(t.cfg, t.seed, outdir, po);
      first_file[i] = paths.back();  // the paired csv / last ratio cdf
      for (auto& p : paths)
        if (p.size() > 11 && p.substr(p.size() - 11) == ".paired.csv")
          first_file[i] = p;
    } else {
      RunResult r = execute_single(t.cfg, t.seed);
      auto paths = write_single(t.cfg, t.seed, outdir, r);
      first_file[i] = paths.front();
    }
  };

  if (jobs <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    size_t next = 0;
    while (next < tasks.size()) {
      size_t batch = std::min<size_t>(jobs, tasks.size() - next);
      std::vector<std::future<void>> fus;
      for (size_t b = 0; b < batch; ++b)
        fus.push_back(
            std::async(std::launch::async, run_task, next + b));
      for (auto& f : fus) f.get();
      next += batch;
    }
  }

  std::string index_path = (fs::path(outdir) / "index.csv").string();
  std::ofstream out(index_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + index_path);
  out << "point,seed,overrides,file\n";
  for (size_t i = 0; i < tasks.size(); ++i)
    out << tasks[i].point << "," << tasks[i].seed << "," << tasks[i].overrides
        << "," << first_file[i] << "\n";
  return index_path;
}

}  // namespace priosim
