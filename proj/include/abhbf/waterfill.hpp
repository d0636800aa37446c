// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace abhbf {

// Waterfilling power allocation: p_i = max(0, mu - 1/g_i) with the level mu
// found by bisection so that sum(p) == total_power (within 1e-10 or better).
// Zero-gain entries receive zero power.
inline std::vector<double> waterfill(const std::vector<double>& gains,
                                     double total_power) {
  if (!(total_power > 0.0))
    throw std::invalid_argument("waterfill: total_power must be > 0");
  double max_inv = 0.0;
  bool any_positive = false;
  for (double g : gains) {
    if (g < 0.0) throw std::invalid_argument("waterfill: gains must be >= 0");
    if (g > 0.0) {
      any_positive = true;
      max_inv = std::max(max_inv, 1.0 / g);
    }
  }
  if (!any_positive) throw std::invalid_argument("waterfill: all gains are zero");

  const auto allocated = [&](double mu) {
    double s = 0.0;
    for (double g : gains)
      if (g > 0.0) s += std::max(0.0, mu - 1.0 / g);
    return s;
  };

  double lo = 0.0, hi = max_inv + total_power;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (allocated(mid) < total_power ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);

  std::vector<double> p(gains.size(), 0.0);
  for (std::size_t i = 0; i < gains.size(); ++i)
    if (gains[i] > 0.0) p[i] = std::max(0.0, mu - 1.0 / gains[i]);
  return p;
}

}  // namespace abhbf
