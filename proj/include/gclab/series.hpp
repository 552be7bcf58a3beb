#pragma once

#include <cstddef>
#include <vector>

#include "gclab/errors.hpp"
#include "gclab/frames.hpp"

namespace gclab {

/// Uniformly sampled 3-axis angular-rate series, struct-of-arrays layout.
struct RateSeries {
  double sample_rate = 0.0;  // Hz
  double start_time = 0.0;   // s
  std::vector<double> p, q, r;  // rad/s

  std::size_t size() const { return p.size(); }

  BodyRates at(std::size_t i) const { return {p[i], q[i], r[i]}; }

  double time(std::size_t i) const { return start_time + static_cast<double>(i) / sample_rate; }

  static RateSeries zeros(double fs, std::size_t n, double t0 = 0.0) {
    RateSeries s;
    s.sample_rate = fs;
    s.start_time = t0;
    s.p.assign(n, 0.0);
    s.q.assign(n, 0.0);
    s.r.assign(n, 0.0);
    return s;
  }

  void validate() const {
    if (!(sample_rate > 0.0)) throw shape_error("RateSeries: sample_rate must be positive");
    if (p.empty()) throw shape_error("RateSeries: empty");
    if (p.size() != q.size() || p.size() != r.size())
      throw shape_error("RateSeries: axis lengths differ");
  }
};

/// Mean of p and q over the series, as BodyRates (r averaged too).
inline BodyRates mean_rates(const RateSeries& s) {
  double sp = 0.0, sq = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sp += s.p[i];
    sq += s.q[i];
    sr += s.r[i];
  }
  const double n = static_cast<double>(s.size());
  return {sp / n, sq / n, sr / n};
}

}  // namespace gclab
