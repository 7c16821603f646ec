#include "priosim/size_dist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace priosim {

SizeDist SizeDist::fixed(uint64_t bytes) {
  if (bytes == 0) throw ConfigError("fixed size must be positive");
  SizeDist d;
  d.kind_ = Kind::kFixed;
  d.lo_ = d.hi_ = bytes;
  return d;
}

SizeDist SizeDist::uniform(uint64_t lo, uint64_t hi) {
  if (lo == 0 || hi < lo) throw ConfigError("uniform size range invalid");
  SizeDist d;
  d.kind_ = Kind::kUniform;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

SizeDist SizeDist::empirical(std::vector<CdfPoint> pts) {
  if (pts.empty()) throw ConfigError("empirical cdf needs at least one point");
  for (size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].bytes == 0)
      throw ConfigError("empirical cdf: zero-byte size at row " +
                        std::to_string(i + 1));
    if (pts[i].cdf <= 0.0 || pts[i].cdf > 1.0)
      throw ConfigError("empirical cdf: fraction out of (0,1] at row " +
                        std::to_string(i + 1));
    if (i > 0 && (pts[i].bytes <= pts[i - 1].bytes ||
                  pts[i].cdf <= pts[i - 1].cdf))
      throw ConfigError("empirical cdf: rows must increase in both columns "
                        "(row " + std::to_string(i + 1) + ")");
  }
  if (std::abs(pts.back().cdf - 1.0) > 1e-9)
    throw ConfigError("empirical cdf: last fraction must be 1.0");
  pts.back().cdf = 1.0;
  SizeDist d;
  d.kind_ = Kind::kEmpirical;
  d.pts_ = std::move(pts);
  return d;
}

SizeDist SizeDist::from_cdf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cdf file: " + path);
  std::vector<CdfPoint> pts;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double bytes = 0, cdf = 0;
    if (!(ls >> bytes)) continue;  // blank/comment line
    if (!(ls >> cdf))
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected `size_bytes cumulative_fraction`");
    if (bytes < 1.0)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": size must be >= 1 byte");
    pts.push_back({static_cast<uint64_t>(std::llround(bytes)), cdf});
  }
  try {
    return empirical(std::move(pts));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

uint64_t SizeDist::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::kFixed:
      return lo_;
    case Kind::kUniform:
      return rng.uniform_between(lo_, hi_);
    case Kind::kEmpirical:
      break;
  }
  double u = rng.uniform01();
  auto it = std::lower_bound(
      pts_.begin(), pts_.end(), u,
      [](const CdfPoint& p, double v) { return p.cdf < v; });
  if (it == pts_.begin()) return pts_.front().bytes;
  if (it == pts_.end()) return pts_.back().bytes;
  auto prev = std::prev(it);
  double span = it->cdf - prev->cdf;
  double frac = span > 0.0 ? (u - prev->cdf) / span : 1.0;
  double x = double(prev->bytes) + frac * double(it->bytes - prev->bytes);
  uint64_t v = static_cast<uint64_t>(x);
  return v < 1 ? 1 : v;
}

double SizeDist::mean_bytes() const {
  switch (kind_) {
    case Kind::kFixed:
      return double(lo_);
    case Kind::kUniform:
      return (double(lo_) + double(hi_)) / 2.0;
    case Kind::kEmpirical:
      break;
  }
  // Point mass at the first entry, trapezoids between the rest.
  double mean = pts_.front().cdf * double(pts_.front().bytes);
  for (size_t i = 1; i < pts_.size(); ++i) {
    double dp = pts_[i].cdf - pts_[i - 1].cdf;
    mean += dp * (double(pts_[i - 1].bytes) + double(pts_[i].bytes)) / 2.0;
  }
  return mean;
}

}  // namespace priosim
