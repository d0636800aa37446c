// SPDX-License-Identifier: Apache-2.0
//
// Wideband geometric THz channel: OFDM subcarrier grid, per-path complex
// gains with optional molecular absorption, and per-subcarrier channel
// matrices assembled from transmit/receive array responses.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "abhbf/array.hpp"
#include "abhbf/rng.hpp"
#include "abhbf/scenario.hpp"

namespace abhbf {

inline constexpr double speed_of_light = 299'792'458.0;  // m/s

// One resolved propagation path. The LoS path has extra_loss = 1; NLoS paths
// carry their additional attenuation entirely in extra_loss since the
// spreading-loss term uses the link distance d_T for every path.
struct PathParams {
  double theta_t = 0.0;
  double psi_t = 0.0;
  double theta_r = 0.0;
  double psi_r = 0.0;
  double delay = 0.0;       // s
  double distance = 0.0;    // m, used in the spreading loss
  double extra_loss = 1.0;  // linear, in (0, 1]
};

struct ChannelRealization {
  std::vector<double> frequencies;  // K subcarrier frequencies, Hz
  std::vector<CMatrix> matrices;    // K matrices, M_R x M_T
  std::vector<PathParams> paths;
};

// Uniform grid of K subcarriers, symmetric about fc:
// f_k = fc + B (2k - K - 1) / (2K), k = 1..K.
inline std::vector<double> subcarrier_frequencies(double fc, double bandwidth, int K) {
  if (K < 1) throw std::invalid_argument("subcarrier_frequencies: K must be >= 1");
  if (bandwidth < 0.0)
    throw std::invalid_argument("subcarrier_frequencies: bandwidth must be >= 0");
  if (!(fc > bandwidth / 2.0))
    throw std::invalid_argument("subcarrier_frequencies: fc must exceed bandwidth/2");
  std::vector<double> f(K);
  for (int k = 1; k <= K; ++k)
    f[k - 1] = fc + bandwidth * (2.0 * k - K - 1.0) / (2.0 * K);
  return f;
}

// Free-space spreading loss with molecular absorption:
// c / (4 pi f d) * exp(-tau_a(f) d / 2).
inline double path_gain(double f, double distance, const AbsorptionModel& absorption) {
  if (!(f > 0.0)) throw std::invalid_argument("path_gain: f must be > 0");
  if (!(distance > 0.0)) throw std::invalid_argument("path_gain: distance must be > 0");
  const double spreading = speed_of_light / (4.0 * pi * f * distance);
  return spreading * std::exp(-0.5 * absorption.coefficient_at(f) * distance);
}

// Draw the L paths of a scenario. Path 1 is LoS (delay d_T/c, no extra loss);
// the rest get a positive excess delay and a log-uniform extra loss. Angles
// are uniform inside each path's configured rectangle. Draw order is part of
// the reproducibility contract; do not reorder.
inline std::vector<PathParams> sample_paths(const ScenarioConfig& scenario,
                                            RandomStream& rng) {
  if (scenario.paths.empty())
    throw std::invalid_argument("sample_paths: scenario has no paths");
  const double los_delay = scenario.d_T / speed_of_light;
  std::vector<PathParams> out;
  out.reserve(scenario.paths.size());
  for (std::size_t l = 0; l < scenario.paths.size(); ++l) {
    const PathSpec& spec = scenario.paths[l];
    PathParams p;
    p.theta_t = rng.uniform(spec.theta - spec.theta_spread, spec.theta + spec.theta_spread);
    p.psi_t = rng.uniform(spec.psi - spec.psi_spread, spec.psi + spec.psi_spread);
    p.theta_r =
        rng.uniform(spec.rx_theta - spec.rx_theta_spread, spec.rx_theta + spec.rx_theta_spread);
    p.psi_r = rng.uniform(spec.rx_psi - spec.rx_psi_spread, spec.rx_psi + spec.rx_psi_spread);
    p.distance = scenario.d_T;
    if (l == 0) {
      p.delay = los_delay;
      p.extra_loss = 1.0;
    } else {
      // (1 - u) maps [0,1) onto (0,1]: the excess delay is strictly positive
      p.delay = los_delay + (1.0 - rng.uniform01()) * scenario.nlos_delay_spread;
      p.extra_loss = std::pow(scenario.nlos_min_loss, 1.0 - rng.uniform01());
    }
    out.push_back(p);
  }
  return out;
}

// H(f) = sum_l loss_l * alpha_l(f) * e^{-j 2 pi tau_l f} a_R a_T^H, a geometric
// multipath model with frequency-dependent array responses on both ends.
inline CMatrix channel_matrix(const std::vector<PathParams>& paths,
                              const UraGeometry& geom_t, const UraGeometry& geom_r,
                              double f, double fc, const AbsorptionModel& absorption) {
  if (!(f > 0.0) || !(fc > 0.0))
    throw std::invalid_argument("channel_matrix: frequencies must be > 0");
  CMatrix h = CMatrix::Zero(geom_r.size(), geom_t.size());
  const double ratio = f / fc;
  for (const PathParams& p : paths) {
    const double gain = p.extra_loss * path_gain(f, p.distance, absorption);
    const Complex phase = std::polar(gain, -2.0 * pi * p.delay * f);
    const CVector ar = steering_vector(geom_r, direction_from_angles(p.theta_r, p.psi_r), ratio);
    const CVector at = steering_vector(geom_t, direction_from_angles(p.theta_t, p.psi_t), ratio);
    h.noalias() += phase * (ar * at.adjoint());
  }
  return h;
}

inline ChannelRealization realize_channel(const ScenarioConfig& scenario,
                                          RandomStream& rng) {
  ChannelRealization ch;
  ch.frequencies = subcarrier_frequencies(scenario.fc, scenario.bandwidth, scenario.K);
  ch.paths = sample_paths(scenario, rng);
  ch.matrices.reserve(ch.frequencies.size());
  for (double f : ch.frequencies)
    ch.matrices.push_back(channel_matrix(ch.paths, scenario.tx_geometry,
                                         scenario.rx_geometry, f, scenario.fc,
                                         scenario.absorption));
  return ch;
}

}  // namespace abhbf
