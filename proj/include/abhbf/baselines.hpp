// SPDX-License-Identifier: Apache-2.0
//
// Reference precoders: fully digital SVD precoding, the conventional
// narrowband matched beamformer, and narrowband spatially sparse precoding
// via orthogonal matching pursuit over the quantized beam dictionary.

#pragma once

#include <stdexcept>
#include <vector>

#include "abhbf/beam_split.hpp"
#include "abhbf/channel.hpp"
#include "abhbf/precoding.hpp"

namespace abhbf {

// Per-subcarrier unconstrained optimum: top-N_D right singular vectors of
// H_k with the same power rule as the hybrid baseband precoder.
inline CMatrix fully_digital_precoder(const CMatrix& h, int n_streams, double snr_linear,
                                      PowerMode mode) {
  if (n_streams > std::min(h.rows(), h.cols()))
    throw std::invalid_argument("fully_digital_precoder: N_D exceeds min(M_T, M_R)");
  return svd_precoder(h, n_streams, mode, snr_linear);
}

// Single beam matched at fc to the dominant path's departure direction,
// scaled by 1/m (unit narrowband gain); applied unchanged at every
// subcarrier, which is exactly what exposes beam split.
inline CVector conventional_narrowband_beamformer(const PathParams& dominant_path,
                                                  const UraGeometry& geom) {
  return matched_beamformer(geom, direction_from_angles(dominant_path.theta_t,
                                                        dominant_path.psi_t));
}

struct SparsePrecoder {
  CMatrix rf;        // M_T x n_rf, dictionary columns
  CMatrix baseband;  // n_rf x N_D, scaled so ||rf * baseband||_F^2 = N_D
  std::vector<int> selected;
};

// Orthogonal matching pursuit against the carrier-frequency channel: greedily
// pick the dictionary column most correlated with the residual of the optimal
// digital precoder, refit by least squares, repeat. The result is reused at
// every subcarrier (a narrowband design, deliberately).
inline SparsePrecoder spatially_sparse_omp(const CMatrix& h_fc, const CMatrix& dictionary,
                                           int n_rf, int n_streams) {
  if (n_rf > dictionary.cols())
    throw std::invalid_argument("spatially_sparse_omp: n_rf exceeds dictionary size");
  if (n_rf < n_streams)
    throw std::invalid_argument("spatially_sparse_omp: n_rf must be >= N_D");
  if (n_streams > std::min(h_fc.rows(), h_fc.cols()))
    throw std::invalid_argument("spatially_sparse_omp: N_D exceeds min(M_T, M_R)");

  Eigen::JacobiSVD<CMatrix> svd(h_fc, Eigen::ComputeThinV);
  CMatrix f_opt = svd.matrixV().leftCols(n_streams);
  fix_column_phases(f_opt);

  SparsePrecoder out;
  std::vector<char> used(dictionary.cols(), 0);
  CMatrix residual = f_opt;
  for (int it = 0; it < n_rf; ++it) {
    const CMatrix corr = dictionary.adjoint() * residual;
    const Eigen::VectorXd energy = corr.rowwise().squaredNorm();
    int best = -1;
    double best_e = -1.0;
    for (int i = 0; i < energy.size(); ++i) {
      if (used[i]) continue;
      if (energy[i] > best_e) {  // strict: ties go to the lowest index
        best_e = energy[i];
        best = i;
      }
    }
    used[best] = 1;
    out.selected.push_back(best);

    out.rf.conservativeResize(dictionary.rows(), it + 1);
    out.rf.col(it) = dictionary.col(best);
    out.baseband = out.rf.colPivHouseholderQr().solve(f_opt);
    residual = f_opt - out.rf * out.baseband;
  }

  const double norm = (out.rf * out.baseband).norm();
  if (norm > 0.0) out.baseband *= std::sqrt(static_cast<double>(n_streams)) / norm;
  return out;
}

}  // namespace abhbf
