// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Expected values are either hand-derived, checked against
// the brute-force oracles defined here, or frozen from the configs they pin.

#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "abhbf/experiment.hpp"

using namespace abhbf;

namespace {

int g_failures = 0;

struct Criterion {
  explicit Criterion(const char* name) : id(name) {}

  const char* id;
  std::vector<std::string> problems;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (problems.empty()) {
      std::printf("PASS  %s  (%.2fs)\n", id, secs);
    } else {
      ++g_failures;
      std::printf("FAIL  %s  (%.2fs)\n", id, secs);
      for (const auto& p : problems) std::printf("      - %s\n", p.c_str());
    }
    std::fflush(stdout);
  }
};

// Literal normalized double sum of the array gain (independent oracle).
double brute_force_gain(const UraGeometry& g, double dU, double dV) {
  Complex acc{0.0, 0.0};
  for (int x = 0; x < g.m_x; ++x)
    for (int y = 0; y < g.m_y; ++y) acc += std::polar(1.0, pi * (x * dU + y * dV));
  return std::abs(acc) / g.size();
}

constexpr double kDeg = pi / 180.0;

PathSpec path_at(double theta_deg, double psi_deg, double spread_deg) {
  PathSpec p;
  p.theta = theta_deg * kDeg;
  p.psi = psi_deg * kDeg;
  p.theta_spread = p.psi_spread = spread_deg * kDeg;
  p.rx_theta = p.theta;
  p.rx_psi = p.psi;
  p.rx_theta_spread = p.rx_psi_spread = p.theta_spread;
  return p;
}

// The desk-scale scenario behind configs/desk_rate_snr.json. B is chosen so
// that m_x * B / fc matches the full-scale profile (32x32 at 30 GHz).
ScenarioConfig desk_scenario(double spread_deg) {
  ScenarioConfig c;
  c.fc = 300e9;
  c.bandwidth = 60e9;
  c.K = 32;
  c.tx_geometry = {16, 16};
  c.rx_geometry = {2, 2};
  c.d_T = 10.0;
  c.N_D = 4;
  c.power_mode = PowerMode::kWaterfilling;
  c.trials = 20;
  c.seed = 12345;
  c.snr_list_db = {-10, -5, 0, 5, 10};
  c.paths = {path_at(45, 0, spread_deg), path_at(30, 40, spread_deg),
             path_at(60, -35, spread_deg), path_at(40, 140, spread_deg)};
  return c;
}

using RateMap = std::map<std::pair<double, std::uint64_t>, std::map<std::string, double>>;

RateMap rates_by_trial(const ResultTable& table) {
  RateMap out;
  for (const auto& r : table.rows)
    if (r.metric == "rate_bps_hz") out[{r.snr_db, r.seed}][r.scheme] = r.value;
  return out;
}

double mean_rate(const RateMap& rates, double snr_db, const std::string& scheme) {
  double sum = 0.0;
  int n = 0;
  for (const auto& [key, by_scheme] : rates)
    if (key.first == snr_db) {
      sum += by_scheme.at(scheme);
      ++n;
    }
  return sum / n;
}

char buf[256];
const char* fmt(const char* f, auto... args) {
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

void criterion_1_grid_orthogonality() {
  Criterion c("[1] grid orthogonality (16x16, A^H A = 256 I within 1e-9)");
  const UraGeometry g{16, 16};
  const CMatrix a = grid_steering_matrix(quantized_grid(g));
  const double err =
      (a.adjoint() * a - 256.0 * CMatrix::Identity(256, 256)).cwiseAbs().maxCoeff();
  c.expect(err < 1e-9, fmt("max |Gram - 256 I| = %.3e", err));
}

void criterion_2_exact_gain_oracle() {
  Criterion c("[2] exact gain vs brute-force double sum and Dirichlet form (1e-12)");
  const double fc = 300e9, r = 1.5;
  const UraGeometry geoms[] = {{4, 4}, {8, 4}, {8, 8}, {16, 16}, {32, 32}};
  double worst_bf = 0.0, worst_cf = 0.0;
  for (const auto& g : geoms) {
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double dU = -0.35 + 0.70 * i / 19.0;
        const double dV = -0.35 + 0.70 * j / 19.0;
        const DirectionPair dir{dU / (r - 1.0), dV / (r - 1.0)};  // |dir| <= 0.99
        const auto [theta, psi] = angles_from_direction(dir);
        const CVector w = matched_beamformer(g, dir);
        const double gain = exact_array_gain(w, g, theta, psi, r * fc, fc);
        const auto dev = direction_deviation(theta, psi, r * fc, fc);
        worst_bf = std::max(worst_bf, std::abs(gain - brute_force_gain(g, dev.u, dev.v)));
        worst_cf =
            std::max(worst_cf, std::abs(gain - dirichlet_array_gain(g, dev.u, dev.v)));
      }
    }
  }
  c.expect(worst_bf < 1e-12, fmt("max |exact - brute force| = %.3e", worst_bf));
  c.expect(worst_cf < 1e-12, fmt("max |exact - closed form| = %.3e", worst_cf));
}

void criterion_3_sinc_fidelity() {
  Criterion c("[3] sinc approximation within 0.02 on the small-argument regime");
  double worst = 0.0;
  for (const UraGeometry g : {UraGeometry{4, 4}, {8, 8}, {16, 16}, {32, 32}, {16, 8}}) {
    for (int i = -12; i <= 12; ++i) {
      for (int j = -12; j <= 12; ++j) {
        const double dU = 0.5 * i / (12.0 * g.m_x);
        const double dV = 0.5 * j / (12.0 * g.m_y);
        worst = std::max(worst, std::abs(dirichlet_array_gain(g, dU, dV) -
                                         sinc_gain_approx(g, dU, dV)));
      }
    }
  }
  c.expect(worst <= 0.02, fmt("max |exact - sinc| = %.4f", worst));

  const UraGeometry g16{16, 16};
  const double exact = dirichlet_array_gain(g16, 0.035355, 0.0);
  const double approx = sinc_gain_approx(g16, 0.035355, 0.0);
  c.expect(std::abs(exact - 0.8733) <= 5e-3, fmt("exact spot value %.5f !~ 0.8733", exact));
  c.expect(std::abs(approx - 0.8733) <= 5e-3, fmt("sinc spot value %.5f !~ 0.8733", approx));
  c.expect(std::abs(exact - approx) <= 5e-3,
           fmt("|exact - approx| = %.2e > 5e-3", std::abs(exact - approx)));
}

void criterion_4_beam_split_degradation() {
  Criterion c("[4] conventional beamformer: center gain 1, band-edge < 0.7");
  const UraGeometry g{32, 32};
  const double fc = 300e9, bw = 30e9;
  PathParams path;
  path.theta_t = 45 * kDeg;
  path.psi_t = 0.0;
  const CVector w = conventional_narrowband_beamformer(path, g);

  const double center = exact_array_gain(w, g, path.theta_t, path.psi_t, fc, fc);
  c.expect(std::abs(center - 1.0) < 1e-9, fmt("center gain %.12f != 1", center));
  for (double edge : {fc - bw / 2, fc + bw / 2}) {
    const double gain = exact_array_gain(w, g, path.theta_t, path.psi_t, edge, fc);
    c.expect(gain < 0.7, fmt("band-edge gain %.4f >= 0.7", gain));
  }

  double worst = 0.0;
  for (double f : subcarrier_frequencies(fc, bw, 128)) {
    const double gain = exact_array_gain(w, g, path.theta_t, path.psi_t, f, fc);
    const auto dev = direction_deviation(path.theta_t, path.psi_t, f, fc);
    worst = std::max(worst, std::abs(gain - brute_force_gain(g, dev.u, dev.v)));
  }
  c.expect(worst < 1e-12, fmt("profile vs oracle max err = %.3e", worst));
}

void criterion_5_abhbf_flatness() {
  Criterion c("[5] AB-HBF flatness (gain >= 0.9 at all k; 10deg floor >= 2deg floor)");
  // 16x16, B/fc = 0.1, K = 32, 20 seeds; support from the configured centers,
  // gain toward the sampled true LoS direction.
  auto scenario = desk_scenario(10.0);
  scenario.bandwidth = 30e9;  // B/fc = 0.1 as pinned by the criterion
  auto scenario2 = scenario;
  for (auto& p : scenario2.paths) {
    p.theta_spread = p.psi_spread = 2 * kDeg;
    p.rx_theta_spread = p.rx_psi_spread = 2 * kDeg;
  }

  const auto grid = quantized_grid(scenario.tx_geometry);
  const CMatrix rf10 = rf_beamformer(select_angle_pairs(build_support(scenario.paths), grid));
  const CMatrix rf2 = rf_beamformer(select_angle_pairs(build_support(scenario2.paths), grid));
  const auto freqs = subcarrier_frequencies(scenario.fc, scenario.bandwidth, scenario.K);

  double floor10 = 1.0;
  int ordering_violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t seed = RandomStream::derive_seed(scenario.seed, trial);
    const auto min_gain = [&](const ScenarioConfig& sc, const CMatrix& rf) {
      RandomStream rng(seed);
      const auto paths = sample_paths(sc, rng);
      double mn = 1.0;
      for (double f : freqs)
        mn = std::min(mn, projection_gain(rf, sc.tx_geometry, paths[0].theta_t,
                                          paths[0].psi_t, f, sc.fc));
      return mn;
    };
    const double m10 = min_gain(scenario, rf10);
    const double m2 = min_gain(scenario2, rf2);
    floor10 = std::min(floor10, m10);
    if (m10 < m2 - 1e-12) ++ordering_violations;
  }
  c.expect(floor10 >= 0.9, fmt("min over seeds/subcarriers = %.4f < 0.9", floor10));
  c.expect(ordering_violations == 0,
           fmt("min-over-k(10deg) < min-over-k(2deg) on %d/20 seeds", ordering_violations));
}

void criterion_6_rate_orderings() {
  Criterion c("[6] rate orderings: FD dominance, sparse <= AB-HBF, spread gap");
  const auto r10 = rates_by_trial(run_rate_snr(desk_scenario(10.0), 4));
  const auto r2 = rates_by_trial(run_rate_snr(desk_scenario(2.0), 4));

  for (const auto* rates : {&r10, &r2}) {
    for (const auto& [key, by_scheme] : *rates) {
      const double fd = by_scheme.at("fully-digital");
      if (by_scheme.at("abhbf") > fd + 1e-9)
        c.expect(false, fmt("abhbf > fully-digital at snr %+g", key.first));
      if (by_scheme.at("sparse") > fd + 1e-9)
        c.expect(false, fmt("sparse > fully-digital at snr %+g", key.first));
    }
  }
  for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
    const double ab = mean_rate(r10, snr, "abhbf");
    const double sp = mean_rate(r10, snr, "sparse");
    c.expect(sp <= ab, fmt("mean sparse %.3f > mean abhbf %.3f at snr %+g", sp, ab, snr));
    const double gap10 = mean_rate(r10, snr, "fully-digital") - ab;
    const double gap2 = mean_rate(r2, snr, "fully-digital") - mean_rate(r2, snr, "abhbf");
    c.expect(gap10 <= gap2,
             fmt("gap(10deg) %.3f > gap(2deg) %.3f at snr %+g", gap10, gap2, snr));
  }
}

void criterion_7_antenna_scaling() {
  Criterion c("[7] antenna scaling: FD-sparse gap non-decreasing over {16,64,256}");
  auto scenario = desk_scenario(10.0);
  scenario.rx_geometry = {2, 1};
  scenario.N_D = 2;
  scenario.snr_list_db = {0.0};
  scenario.mt_sweep = {16, 64, 256};
  const auto table = run_rate_antennas(scenario, 4);

  std::map<std::string, std::map<std::string, std::pair<double, int>>> acc;
  for (const auto& r : table.rows) {
    auto& [sum, n] = acc[r.metric][r.scheme];
    sum += r.value;
    ++n;
  }
  double prev = -1.0;
  for (int m_t : {16, 64, 256}) {
    const auto& by_scheme = acc.at(fmt("rate_bps_hz[m_t=%d]", m_t));
    const auto [fd_sum, fd_n] = by_scheme.at("fully-digital");
    const auto [sp_sum, sp_n] = by_scheme.at("sparse");
    const double gap = fd_sum / fd_n - sp_sum / sp_n;
    c.expect(gap >= prev, fmt("gap %.4f at m_t=%d below previous %.4f", gap, m_t, prev));
    prev = gap;
  }
}

void criterion_8_power_and_svd_contracts() {
  Criterion c("[8] power + SVD contracts on 200 random instances; waterfill spot");
  const auto grid = quantized_grid({4, 4});
  const std::vector<PathSpec> support_paths{path_at(45, 0, 45), path_at(45, 90, 45),
                                            path_at(45, 180, 45), path_at(45, -90, 45)};
  const auto sel = select_angle_pairs(build_support(support_paths), grid);
  const CMatrix rf = rf_beamformer(sel);
  RandomStream rng(777);
  double worst_power = 0.0, worst_recon = 0.0;
  bool descending = true;
  for (int i = 0; i < 200; ++i) {
    CMatrix h(3, 16);
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 16; ++col) h(r, col) = rng.complex_gaussian();
    const CMatrix h_eff = effective_channel(h, rf);
    const PowerMode mode = (i % 2 == 0) ? PowerMode::kEqual : PowerMode::kWaterfilling;
    const CMatrix b = baseband_precoder(h_eff, 2, mode, 1.0 + i * 0.05);
    worst_power = std::max(worst_power, std::abs((rf * b).squaredNorm() - 2.0));

    Eigen::JacobiSVD<CMatrix> svd(h_eff, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CMatrix recon =
        svd.matrixU() * svd.singularValues().asDiagonal() * svd.matrixV().adjoint();
    worst_recon = std::max(worst_recon, (recon - h_eff).norm() / h_eff.norm());
    for (int s = 1; s < svd.singularValues().size(); ++s)
      descending = descending && svd.singularValues()[s] <= svd.singularValues()[s - 1];
  }
  c.expect(worst_power < 1e-9, fmt("max |power - N_D| = %.3e", worst_power));
  c.expect(worst_recon < 1e-9, fmt("max SVD reconstruction error = %.3e", worst_recon));
  c.expect(descending, "singular values not descending");

  const auto p = waterfill({4.0, 1.0}, 2.0);
  c.expect(std::abs(p[0] - 1.375) < 1e-10 && std::abs(p[1] - 0.625) < 1e-10,
           fmt("waterfill([4,1],2) = [%.12f, %.12f]", p[0], p[1]));
}

void criterion_9_determinism() {
  Criterion c("[9] determinism: byte-identical CSV + metadata, serial == parallel");
  const auto scenario = desk_scenario(10.0);
  const auto render = [](const ResultTable& t) {
    std::ostringstream csv;
    emit_csv(t, csv);
    return std::make_pair(csv.str(), t.metadata.dump());
  };
  const auto [csv_a, meta_a] = render(run_rate_snr(scenario, 1));
  const auto [csv_b, meta_b] = render(run_rate_snr(scenario, 1));
  const auto [csv_p, meta_p] = render(run_rate_snr(scenario, 4));
  c.expect(csv_a == csv_b, "repeated serial runs differ");
  c.expect(meta_a == meta_b, "repeated serial metadata differs");
  c.expect(csv_a == csv_p, "parallel CSV differs from serial");
  c.expect(meta_a == meta_p, "parallel metadata differs from serial");
}

}  // namespace

int main() {
  criterion_1_grid_orthogonality();
  criterion_2_exact_gain_oracle();
  criterion_3_sinc_fidelity();
  criterion_4_beam_split_degradation();
  criterion_5_abhbf_flatness();
  criterion_6_rate_orderings();
  criterion_7_antenna_scaling();
  criterion_8_power_and_svd_contracts();
  criterion_9_determinism();
  if (g_failures > 0)
    std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
