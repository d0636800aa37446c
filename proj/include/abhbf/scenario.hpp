// SPDX-License-Identifier: Apache-2.0
//
// Scenario description shared by the channel generator and the experiment
// harness. Angles are radians here; the JSON config layer (config_json.hpp)
// converts from degrees on load.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "abhbf/array.hpp"

namespace abhbf {

// Configuration problems carry the offending field name in the message and
// map to a dedicated CLI exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PowerMode { kEqual, kWaterfilling };
enum class RfMode { kCarrierFlat, kPerSubcarrier };

// Piecewise-linear molecular absorption coefficient tau_a(f) in 1/m.
// Linear interpolation between samples, constant extrapolation outside.
// Default is no absorption.
class AbsorptionModel {
 public:
  AbsorptionModel() = default;

  static AbsorptionModel none() { return AbsorptionModel{}; }

  static AbsorptionModel constant(double coefficient) {
    AbsorptionModel m;
    m.freqs_ = {0.0};
    m.coeffs_ = {coefficient};
    m.check();
    return m;
  }

  static AbsorptionModel table(std::vector<double> freqs, std::vector<double> coeffs) {
    AbsorptionModel m;
    m.freqs_ = std::move(freqs);
    m.coeffs_ = std::move(coeffs);
    m.check();
    return m;
  }

  double coefficient_at(double f) const {
    if (coeffs_.empty()) return 0.0;
    if (coeffs_.size() == 1 || f <= freqs_.front()) return coeffs_.front();
    if (f >= freqs_.back()) return coeffs_.back();
    std::size_t i = 1;
    while (freqs_[i] < f) ++i;
    const double w = (f - freqs_[i - 1]) / (freqs_[i] - freqs_[i - 1]);
    return coeffs_[i - 1] + w * (coeffs_[i] - coeffs_[i - 1]);
  }

  bool is_zero() const { return coeffs_.empty(); }

  const std::vector<double>& frequencies() const { return freqs_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  void check() const {
    if (freqs_.size() != coeffs_.size())
      throw ConfigError("absorption: frequency/coefficient length mismatch");
    for (double c : coeffs_)
      if (c < 0.0) throw ConfigError("absorption: coefficients must be >= 0");
    for (std::size_t i = 1; i < freqs_.size(); ++i)
      if (!(freqs_[i] > freqs_[i - 1]))
        throw ConfigError("absorption: table frequencies must be strictly increasing");
  }

  std::vector<double> freqs_;
  std::vector<double> coeffs_;
};

// Nominal path direction plus angular spread, the "coarse knowledge" the
// transmitter designs against. Receive-side values default to the transmit
// values when the config omits them.
struct PathSpec {
  double theta = 0.0;
  double psi = 0.0;
  double theta_spread = 0.0;
  double psi_spread = 0.0;
  double rx_theta = 0.0;
  double rx_psi = 0.0;
  double rx_theta_spread = 0.0;
  double rx_psi_spread = 0.0;
};

struct ScenarioConfig {
  double fc = 300e9;
  double bandwidth = 30e9;
  int K = 128;
  UraGeometry tx_geometry{32, 32};
  UraGeometry rx_geometry{2, 2};
  double d_T = 10.0;
  std::vector<PathSpec> paths;
  std::vector<double> snr_list_db{0.0};
  int N_D = 4;
  PowerMode power_mode = PowerMode::kWaterfilling;
  RfMode rf_mode = RfMode::kCarrierFlat;
  std::optional<int> max_beams;
  int trials = 1;
  std::uint64_t seed = 1;
  AbsorptionModel absorption;

  // NLoS statistics; configuration defaults, not modeling claims.
  double nlos_delay_spread = 20e-9;
  double nlos_min_loss = 0.0316;  // -15 dB relative to the LoS gain factor

  std::vector<std::string> schemes{"fully-digital", "abhbf", "sparse"};
  std::optional<int> sparse_n_rf;  // default: AB-HBF's realized beam count

  // Sweep knobs for the figure-specific subcommands.
  std::vector<double> spread_sweep_deg{2.0, 5.0, 10.0};
  std::vector<int> mt_sweep{16, 64, 256};
  std::vector<int> cut_subcarriers;  // default: first, center, last
  double sweep_half_width = 15.0 * pi / 180.0;
  int sweep_points = 31;

  int num_paths() const { return static_cast<int>(paths.size()); }

  void validate() const {
    if (!(fc > 0.0)) throw ConfigError("fc: must be > 0");
    if (bandwidth < 0.0) throw ConfigError("bandwidth: must be >= 0");
    if (!(fc > bandwidth / 2.0)) throw ConfigError("fc: must exceed bandwidth/2");
    if (K < 1) throw ConfigError("K: must be >= 1");
    if (!(d_T > 0.0)) throw ConfigError("d_T: must be > 0");
    if (paths.empty()) throw ConfigError("paths: at least one path required");
    if (N_D < 1) throw ConfigError("N_D: must be >= 1");
    if (N_D > rx_geometry.size())
      throw ConfigError("N_D: must not exceed the receive array size");
    if (trials < 1) throw ConfigError("trials: must be >= 1");
    if (snr_list_db.empty()) throw ConfigError("snr_list: must not be empty");
    if (max_beams && *max_beams < num_paths())
      throw ConfigError("max_beams: must be >= number of paths");
    if (!(nlos_delay_spread >= 0.0)) throw ConfigError("nlos_delay_spread: must be >= 0");
    if (!(nlos_min_loss > 0.0 && nlos_min_loss <= 1.0))
      throw ConfigError("nlos_min_loss: must be in (0, 1]");
    if (sweep_points < 2) throw ConfigError("sweep_points: must be >= 2");
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto& p = paths[i];
      const std::string tag = "paths[" + std::to_string(i) + "]";
      if (p.theta_spread < 0.0 || p.psi_spread < 0.0 || p.rx_theta_spread < 0.0 ||
          p.rx_psi_spread < 0.0)
        throw ConfigError(tag + ": spreads must be >= 0");
      if (p.theta - p.theta_spread < 0.0 || p.theta + p.theta_spread > pi / 2)
        throw ConfigError(tag + ": theta +/- spread must stay within [0, 90] deg");
      if (p.rx_theta - p.rx_theta_spread < 0.0 || p.rx_theta + p.rx_theta_spread > pi / 2)
        throw ConfigError(tag + ": rx_theta +/- spread must stay within [0, 90] deg");
    }
  }
};

}  // namespace abhbf
