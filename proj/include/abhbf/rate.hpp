// SPDX-License-Identifier: Apache-2.0
//
// Achievable-rate evaluation and the per-symbol OFDM signal model.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

#include "abhbf/array.hpp"
#include "abhbf/rng.hpp"

namespace abhbf {

// log2 det(I + (snr/N_D) G G^H) for G = H F B, via Cholesky of the Gram matrix.
inline double log_det_rate(const CMatrix& effective, double snr_linear, int n_streams) {
  const Eigen::Index m = effective.rows();
  CMatrix gram = CMatrix::Identity(m, m);
  gram.noalias() += (snr_linear / n_streams) * (effective * effective.adjoint());
  const Eigen::LLT<CMatrix> llt(gram);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    log_det += 2.0 * std::log(std::real(llt.matrixLLT()(i, i)));
  return log_det / std::numbers::ln2;
}

// Gaussian-signaling spectral efficiency averaged over subcarriers:
// (1/K) sum_k log2 det(I + (snr/N_D) H_k F_k B_k B_k^H F_k^H H_k^H).
// rf_stages holds one matrix (frequency-flat) or K matrices. Each combined
// precoder must stay within the power budget ||F_k B_k||_F^2 <= N_D; only
// budget violations are an error so that rank-deficient (underfilled)
// precoders still evaluate.
inline double spectral_efficiency(const std::vector<CMatrix>& channel,
                                  const std::vector<CMatrix>& rf_stages,
                                  const std::vector<CMatrix>& baseband,
                                  double snr_linear, int n_streams) {
  const std::size_t K = channel.size();
  if (baseband.size() != K || (rf_stages.size() != 1 && rf_stages.size() != K))
    throw std::invalid_argument("spectral_efficiency: per-subcarrier size mismatch");
  if (!(snr_linear > 0.0))
    throw std::invalid_argument("spectral_efficiency: snr must be > 0");
  double rate = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const CMatrix& rf = rf_stages.size() == 1 ? rf_stages.front() : rf_stages[k];
    const CMatrix t = rf * baseband[k];
    const double power = t.squaredNorm();
    if (power > n_streams + 1e-6)
      throw std::invalid_argument("spectral_efficiency: power constraint violated");
    rate += log_det_rate(channel[k] * t, snr_linear, n_streams);
  }
  return rate / static_cast<double>(K);
}

// Convenience overload for a fully digital precoder (F_k B_k given directly).
inline double spectral_efficiency(const std::vector<CMatrix>& channel,
                                  const std::vector<CMatrix>& digital_precoders,
                                  double snr_linear, int n_streams) {
  const std::size_t K = channel.size();
  if (digital_precoders.size() != K)
    throw std::invalid_argument("spectral_efficiency: per-subcarrier size mismatch");
  if (!(snr_linear > 0.0))
    throw std::invalid_argument("spectral_efficiency: snr must be > 0");
  double rate = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (digital_precoders[k].squaredNorm() > n_streams + 1e-6)
      throw std::invalid_argument("spectral_efficiency: power constraint violated");
    rate += log_det_rate(channel[k] * digital_precoders[k], snr_linear, n_streams);
  }
  return rate / static_cast<double>(K);
}

// One OFDM subcarrier through the system: y = sqrt(rho) H F B d + n with
// noise variance sigma^2 per receive entry and rho = snr * sigma^2 (sigma^2
// = 1 convention). noise_variance 0 gives the noiseless signal.
inline CVector simulate_ofdm_symbol(const CMatrix& h, const CMatrix& rf,
                                    const CMatrix& baseband, const CVector& data,
                                    double snr_linear, RandomStream& rng,
                                    double noise_variance = 1.0) {
  if (baseband.cols() != data.size())
    throw std::invalid_argument("simulate_ofdm_symbol: data length != N_D");
  CVector y = std::sqrt(snr_linear * (noise_variance > 0.0 ? noise_variance : 1.0)) *
              (h * (rf * (baseband * data)));
  if (noise_variance > 0.0) {
    const double sigma = std::sqrt(noise_variance);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * rng.complex_gaussian();
  }
  return y;
}

}  // namespace abhbf
