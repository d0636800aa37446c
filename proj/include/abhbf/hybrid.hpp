// SPDX-License-Identifier: Apache-2.0
//
// Angular-based hybrid beamforming: build the AoD support from coarse path
// knowledge, select quantized grid beams inside it, assemble the RF
// dictionary beamformer and the per-subcarrier SVD baseband precoder.

#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "abhbf/array.hpp"
#include "abhbf/precoding.hpp"
#include "abhbf/scenario.hpp"

namespace abhbf {

// Union of per-path angle rectangles [theta +/- d_theta] x [psi +/- d_psi].
// Membership is tested in angle space; psi is compared on the circle.
class AngularSupport {
 public:
  struct Rect {
    double theta_center;
    double psi_center;
    double theta_spread;
    double psi_spread;
  };

  explicit AngularSupport(std::vector<Rect> rects) : rects_(std::move(rects)) {
    if (rects_.empty())
      throw std::invalid_argument("AngularSupport: at least one path required");
    for (const Rect& r : rects_)
      if (r.theta_spread < 0.0 || r.psi_spread < 0.0)
        throw std::invalid_argument("AngularSupport: spreads must be >= 0");
  }

  bool contains(DirectionPair dir) const {
    if (dir.squared_norm() > 1.0) return false;  // not a physical direction
    const auto [theta, psi] = angles_from_direction(dir);
    // Tiny slack absorbs the rounding of the angle round trip, so a
    // zero-spread support still contains the image of its own center.
    constexpr double kTol = 1e-12;
    for (const Rect& r : rects_) {
      if (theta < r.theta_center - r.theta_spread - kTol ||
          theta > r.theta_center + r.theta_spread + kTol)
        continue;
      const double dpsi = std::remainder(psi - r.psi_center, 2.0 * pi);
      if (std::abs(dpsi) <= r.psi_spread + kTol) return true;
    }
    return false;
  }

  const std::vector<Rect>& rects() const { return rects_; }

 private:
  std::vector<Rect> rects_;
};

inline AngularSupport build_support(std::span<const PathSpec> paths) {
  std::vector<AngularSupport::Rect> rects;
  rects.reserve(paths.size());
  for (const PathSpec& p : paths)
    rects.push_back({p.theta, p.psi, p.theta_spread, p.psi_spread});
  return AngularSupport(std::move(rects));
}

// Quantized angle pairs chosen for the RF stage. Grid indices are kept in
// ascending (grid) order; their count defines the RF-chain count N_T.
struct BeamSelection {
  UraGeometry geometry;
  std::vector<int> grid_indices;
  std::vector<DirectionPair> selected;

  int size() const { return static_cast<int>(selected.size()); }
};

// All grid pairs inside the support, plus the pair nearest to each path
// center so every path keeps at least one beam even at zero spread. An
// optional cap keeps the max_beams pairs closest to any path center, ties
// broken by grid order.
inline BeamSelection select_angle_pairs(const AngularSupport& support,
                                        const QuantizedAngleGrid& grid,
                                        std::optional<int> max_beams = std::nullopt) {
  const int m = static_cast<int>(grid.pairs.size());
  const int n_paths = static_cast<int>(support.rects().size());
  if (max_beams && *max_beams < n_paths)
    throw std::invalid_argument(
        "select_angle_pairs: max_beams below the path count would drop a path");

  std::vector<char> picked(m, 0);
  for (int i = 0; i < m; ++i)
    if (support.contains(grid.pairs[i])) picked[i] = 1;

  std::vector<DirectionPair> centers;
  centers.reserve(n_paths);
  for (const auto& r : support.rects())
    centers.push_back(direction_from_angles(r.theta_center, r.psi_center));

  for (const DirectionPair& c : centers) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double du = grid.pairs[i].u - c.u;
      const double dv = grid.pairs[i].v - c.v;
      const double d = du * du + dv * dv;
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    picked[best] = 1;
  }

  std::vector<int> indices;
  for (int i = 0; i < m; ++i)
    if (picked[i]) indices.push_back(i);

  if (max_beams && static_cast<int>(indices.size()) > *max_beams) {
    const auto center_distance = [&](int i) {
      double best = std::numeric_limits<double>::infinity();
      for (const DirectionPair& c : centers) {
        const double du = grid.pairs[i].u - c.u;
        const double dv = grid.pairs[i].v - c.v;
        best = std::min(best, du * du + dv * dv);
      }
      return best;
    };
    std::stable_sort(indices.begin(), indices.end(), [&](int a, int b) {
      const double da = center_distance(a), db = center_distance(b);
      return da != db ? da < db : a < b;
    });
    indices.resize(*max_beams);
    std::sort(indices.begin(), indices.end());
  }

  BeamSelection sel{grid.geometry, std::move(indices), {}};
  sel.selected.reserve(sel.grid_indices.size());
  for (int i : sel.grid_indices) sel.selected.push_back(grid.pairs[i]);
  return sel;
}

// RF dictionary beamformer: unit-norm steering columns at the selected
// pairs. freq_ratio = 1 is the frequency-flat (phase-shifter) matrix whose
// columns are orthonormal; other ratios give the literal per-subcarrier
// dictionary for comparison runs.
inline CMatrix rf_beamformer(const BeamSelection& selection, double freq_ratio = 1.0) {
  const int m = selection.geometry.size();
  CMatrix rf(m, selection.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < selection.size(); ++j)
    rf.col(j) = scale * steering_vector(selection.geometry, selection.selected[j], freq_ratio);
  return rf;
}

inline std::vector<CMatrix> rf_beamformer_per_subcarrier(
    const BeamSelection& selection, std::span<const double> freq_ratios) {
  std::vector<CMatrix> out;
  out.reserve(freq_ratios.size());
  for (double r : freq_ratios) out.push_back(rf_beamformer(selection, r));
  return out;
}

inline CMatrix effective_channel(const CMatrix& h, const CMatrix& rf) {
  if (h.cols() != rf.rows())
    throw std::invalid_argument("effective_channel: dimension mismatch");
  return h * rf;
}

// Baseband precoder for one subcarrier: SVD of the effective channel,
// top-N_D right singular vectors with the configured power loading.
inline CMatrix baseband_precoder(const CMatrix& h_eff, int n_streams, PowerMode mode,
                                 double snr_linear = 1.0) {
  if (n_streams > std::min(h_eff.rows(), h_eff.cols()))
    throw std::invalid_argument("baseband_precoder: N_D exceeds min(N_T, M_R)");
  return svd_precoder(h_eff, n_streams, mode, snr_linear);
}

// Norm of the orthogonal projection of the subcarrier steering vector onto
// the RF column space, scaled so a matched single beam at fc scores 1. This
// is the normalized array gain with optimal unit-norm baseband combining.
inline double projection_gain(const CMatrix& rf, const UraGeometry& geom, double theta,
                              double psi, double f, double fc) {
  if (rf.rows() != geom.size())
    throw std::invalid_argument("projection_gain: rf rows != array size");
  const CMatrix gram = rf.adjoint() * rf;
  const double err =
      (gram - CMatrix::Identity(rf.cols(), rf.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-8)
    throw std::invalid_argument("projection_gain: rf columns must be orthonormal");
  const CVector a = steering_vector(geom, direction_from_angles(theta, psi), f / fc);
  return (rf.adjoint() * a).norm() / std::sqrt(static_cast<double>(geom.size()));
}

inline double projection_gain(const BeamSelection& selection, double theta, double psi,
                              double f, double fc) {
  return projection_gain(rf_beamformer(selection), selection.geometry, theta, psi, f, fc);
}

// Multi-beam counterpart of the single-beam gain_profile in beam_split.hpp.
inline std::vector<double> gain_profile(const BeamSelection& selection, double theta,
                                        double psi, std::span<const double> frequencies,
                                        double fc) {
  const CMatrix rf = rf_beamformer(selection);
  std::vector<double> out;
  out.reserve(frequencies.size());
  for (double f : frequencies)
    out.push_back(projection_gain(rf, selection.geometry, theta, psi, f, fc));
  return out;
}

// RF stage plus per-subcarrier baseband precoders. rf_stages holds a single
// matrix in carrier-flat mode or one matrix per subcarrier in the literal
// per-subcarrier mode.
struct HybridPrecoder {
  std::vector<CMatrix> rf_stages;
  std::vector<CMatrix> baseband;

  bool frequency_flat() const { return rf_stages.size() == 1; }
  const CMatrix& rf(std::size_t k) const {
    return frequency_flat() ? rf_stages.front() : rf_stages[k];
  }
};

// Design the full hybrid precoder for one channel realization. The combined
// precoder is rescaled per subcarrier so ||F B||_F^2 == N_D exactly; with
// orthonormal RF columns this is a no-op up to rounding.
inline HybridPrecoder design_hybrid_precoder(const std::vector<CMatrix>& channel,
                                             std::span<const double> frequencies,
                                             double fc, const BeamSelection& selection,
                                             int n_streams, PowerMode mode,
                                             double snr_linear, RfMode rf_mode) {
  HybridPrecoder out;
  const std::size_t K = channel.size();
  if (rf_mode == RfMode::kCarrierFlat) {
    out.rf_stages.push_back(rf_beamformer(selection));
  } else {
    out.rf_stages.reserve(K);
    for (std::size_t k = 0; k < K; ++k)
      out.rf_stages.push_back(rf_beamformer(selection, frequencies[k] / fc));
  }
  out.baseband.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    const CMatrix& rf = out.rf(k);
    CMatrix b = baseband_precoder(effective_channel(channel[k], rf), n_streams, mode,
                                  snr_linear);
    const double norm = (rf * b).norm();
    if (norm > 0.0) b *= std::sqrt(static_cast<double>(n_streams)) / norm;
    out.baseband.push_back(std::move(b));
  }
  return out;
}

}  // namespace abhbf
