#ifndef PRIOSIM_SIZE_DIST_HPP
#define PRIOSIM_SIZE_DIST_HPP

#include <string>
#include <vector>

#include "priosim/rng.hpp"

namespace priosim {

// Flow-size distribution: fixed, uniform, or an empirical CDF loaded from a
// two-column file (size_bytes cumulative_fraction). Empirical sampling
// interpolates linearly between table points; probability mass below the
// first point collapses onto it.
class SizeDist {
 public:
  struct CdfPoint {
    uint64_t bytes;
    double cdf;
  };

  static SizeDist fixed(uint64_t bytes);
  static SizeDist uniform(uint64_t lo, uint64_t hi);
  static SizeDist empirical(std::vector<CdfPoint> pts);
  static SizeDist from_cdf_file(const std::string& path);

  uint64_t sample(RngStream& rng) const;
  double mean_bytes() const;

  const std::vector<CdfPoint>& points() const { return pts_; }

 private:
  enum class Kind { kFixed, kUniform, kEmpirical };
  SizeDist() = default;

  Kind kind_ = Kind::kFixed;
  uint64_t lo_ = 0, hi_ = 0;
  std::vector<CdfPoint> pts_;
};

}  // namespace priosim

#endif
