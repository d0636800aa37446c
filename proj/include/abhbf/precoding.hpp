// SPDX-License-Identifier: Apache-2.0
//
// Shared SVD precoding core: top-N_D right singular vectors with a diagonal
// power loading. Used for the fully digital precoder (on H) and the hybrid
// baseband precoder (on the effective channel).

#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "abhbf/array.hpp"
#include "abhbf/scenario.hpp"
#include "abhbf/waterfill.hpp"

namespace abhbf {

// Deterministic SVD phase convention: rotate each column so its
// largest-magnitude entry (first one on ties) is real and positive.
inline void fix_column_phases(CMatrix& m) {
  for (int j = 0; j < m.cols(); ++j) {
    Eigen::Index idx = 0;
    m.col(j).cwiseAbs().maxCoeff(&idx);
    const Complex pivot = m(idx, j);
    const double mag = std::abs(pivot);
    if (mag > 0.0) m.col(j) *= std::conj(pivot) / mag;
  }
}

// V_1 * P for a channel-like matrix: V_1 = first n_streams right singular
// vectors (descending singular values, phase-fixed), P diagonal with
// sum p_i^2 = n_streams. Equal mode loads every stream with p_i = 1;
// waterfilling distributes over the per-stream gains snr * sigma_i^2 /
// n_streams of the log-det rate and renormalizes. A zero matrix yields a
// zero precoder (all streams rank-deficient, zero power).
inline CMatrix svd_precoder(const CMatrix& h, int n_streams, PowerMode mode,
                            double snr_linear) {
  const int max_streams = static_cast<int>(std::min(h.rows(), h.cols()));
  if (n_streams < 1 || n_streams > max_streams)
    throw std::invalid_argument("svd_precoder: n_streams must be in [1, min(dims)]");
  if (mode == PowerMode::kWaterfilling && !(snr_linear > 0.0))
    throw std::invalid_argument("svd_precoder: waterfilling needs snr > 0");

  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  CMatrix v1 = svd.matrixV().leftCols(n_streams);
  fix_column_phases(v1);
  const Eigen::VectorXd sigma = svd.singularValues().head(n_streams);

  Eigen::VectorXd p2(n_streams);  // squared diagonal of P
  if (mode == PowerMode::kEqual) {
    p2.setOnes();
  } else {
    if (sigma.maxCoeff() <= 0.0) return CMatrix::Zero(h.cols(), n_streams);
    std::vector<double> gains(n_streams);
    for (int i = 0; i < n_streams; ++i)
      gains[i] = snr_linear * sigma[i] * sigma[i] / n_streams;
    const std::vector<double> alloc = waterfill(gains, static_cast<double>(n_streams));
    double total = 0.0;
    for (double q : alloc) total += q;
    for (int i = 0; i < n_streams; ++i) p2[i] = alloc[i] * n_streams / total;
  }
  return v1 * p2.cwiseSqrt().asDiagonal();
}

}  // namespace abhbf
