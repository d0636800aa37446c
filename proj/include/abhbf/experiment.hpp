// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: seeded Monte-Carlo trials over channel draws,
// per-scheme precoder construction, gain/rate metrics, and byte-stable CSV +
// metadata emission. One runner per CLI subcommand.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "abhbf/baselines.hpp"
#include "abhbf/channel.hpp"
#include "abhbf/config_json.hpp"
#include "abhbf/hybrid.hpp"
#include "abhbf/rate.hpp"
#include "abhbf/version.hpp"

namespace abhbf {

struct ResultRow {
  std::string scheme;
  double snr_db = 0.0;
  int subcarrier = -1;  // 1-based index; -1 prints as "avg"
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  nlohmann::json metadata;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string angle_tag(const char* name, double radians) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s=%.4f", name, radians * 180.0 / pi);
  return buf;
}

inline void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.scheme, a.snr_db, a.subcarrier, a.seed, a.metric) <
           std::tie(b.scheme, b.snr_db, b.subcarrier, b.seed, b.metric);
  });
}

struct TrialOutput {
  std::vector<ResultRow> rows;
  nlohmann::json meta;
};

// Run one function per trial, optionally across threads. Each trial owns an
// independent substream derived from (seed, trial), so the merged output is
// identical for any thread count.
template <typename Fn>
std::vector<TrialOutput> run_trials(int trials, std::uint64_t base_seed, int threads,
                                    Fn&& fn) {
  std::vector<TrialOutput> out(trials);
  threads = std::clamp(threads, 1, trials);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int t = w; t < trials; t += threads)
          out[t] = fn(t, RandomStream::derive_seed(base_seed, t));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline bool has_scheme(const ScenarioConfig& c, const std::string& name) {
  return std::find(c.schemes.begin(), c.schemes.end(), name) != c.schemes.end();
}

// Config SNRs are referenced to the LoS spreading gain at fc (receive-side
// SNR): the transmit power inverts the deterministic free-space loss, so the
// 0 dB point corresponds to unit per-element receive SNR regardless of d_T
// and fc. The channel matrices themselves stay physical.
inline double effective_snr(const ScenarioConfig& c, double snr_db) {
  const double g_ref = path_gain(c.fc, c.d_T, c.absorption);
  return std::pow(10.0, snr_db / 10.0) / (g_ref * g_ref);
}

inline void check_schemes(const ScenarioConfig& c) {
  for (const auto& s : c.schemes)
    if (s != "fully-digital" && s != "abhbf" && s != "sparse" && s != "conventional")
      throw ConfigError("schemes: unknown scheme '" + s + "'");
}

// Per-trial artifacts shared by the rate and gain paths of one scenario.
struct TrialContext {
  ChannelRealization channel;
  CMatrix h_carrier;  // channel at exactly fc, for the narrowband baseline
};

inline TrialContext make_trial_context(const ScenarioConfig& c, std::uint64_t seed) {
  RandomStream rng(seed);
  TrialContext ctx;
  ctx.channel = realize_channel(c, rng);
  ctx.h_carrier = channel_matrix(ctx.channel.paths, c.tx_geometry, c.rx_geometry, c.fc,
                                 c.fc, c.absorption);
  return ctx;
}

inline ResultTable finish(const ScenarioConfig& c, const char* subcommand,
                          std::vector<TrialOutput> outputs) {
  ResultTable table;
  auto trials_meta = nlohmann::json::array();
  for (auto& o : outputs) {
    table.rows.insert(table.rows.end(), o.rows.begin(), o.rows.end());
    trials_meta.push_back(std::move(o.meta));
  }
  sort_rows(table.rows);
  const nlohmann::json config_json = config_to_json(c);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(config_json.dump())));
  table.metadata = {{"tool_version", kVersion},
                    {"subcommand", subcommand},
                    {"config", config_json},
                    {"config_hash", hash},
                    {"trials", std::move(trials_meta)}};
  return table;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// rate-snr: per-trial achievable rates of the requested schemes across the
// SNR sweep, plus per-subcarrier gain profiles toward the true LoS path.
// ---------------------------------------------------------------------------
inline ResultTable run_rate_snr(const ScenarioConfig& c, int threads = 1) {
  c.validate();
  detail::check_schemes(c);

  const auto grid = quantized_grid(c.tx_geometry);
  const auto selection = select_angle_pairs(build_support(c.paths), grid, c.max_beams);
  const bool want_abhbf = detail::has_scheme(c, "abhbf");
  const bool want_sparse = detail::has_scheme(c, "sparse");
  const bool want_digital = detail::has_scheme(c, "fully-digital");
  const bool want_conv = detail::has_scheme(c, "conventional");
  if (want_abhbf && selection.size() < c.N_D)
    throw ConfigError("N_D: exceeds the realized beam count N_T = " +
                      std::to_string(selection.size()));
  const int sparse_n_rf = c.sparse_n_rf.value_or(std::max(selection.size(), c.N_D));
  if (want_sparse && sparse_n_rf < c.N_D)
    throw ConfigError("sparse_n_rf: must be >= N_D");
  const CMatrix dict = grid_steering_matrix(grid) / std::sqrt(double(c.tx_geometry.size()));

  auto outputs = detail::run_trials(c.trials, c.seed, threads, [&](int trial,
                                                                   std::uint64_t seed) {
    const auto ctx = detail::make_trial_context(c, seed);
    const PathParams& los = ctx.channel.paths.front();
    detail::TrialOutput out;
    out.meta = {{"trial", trial},
                {"seed", seed},
                {"n_t", selection.size()},
                {"sparse_n_rf", want_sparse ? nlohmann::json(sparse_n_rf)
                                            : nlohmann::json(nullptr)}};

    SparsePrecoder sparse;
    if (want_sparse) sparse = spatially_sparse_omp(ctx.h_carrier, dict, sparse_n_rf, c.N_D);

    // gain profiles (SNR-independent, emitted with snr_db = 0)
    const CMatrix rf_flat = rf_beamformer(selection);
    for (int k = 0; k < c.K; ++k) {
      const double f = ctx.channel.frequencies[k];
      if (want_abhbf)
        out.rows.push_back({"abhbf", 0.0, k + 1, "gain",
                            projection_gain(rf_flat, c.tx_geometry, los.theta_t,
                                            los.psi_t, f, c.fc),
                            seed});
      if (want_sparse)
        out.rows.push_back({"sparse", 0.0, k + 1, "gain",
                            projection_gain(sparse.rf, c.tx_geometry, los.theta_t,
                                            los.psi_t, f, c.fc),
                            seed});
      if (want_conv) {
        const CVector w = conventional_narrowband_beamformer(los, c.tx_geometry);
        out.rows.push_back({"conventional", 0.0, k + 1, "gain",
                            exact_array_gain(w, c.tx_geometry, los.theta_t, los.psi_t,
                                             f, c.fc),
                            seed});
      }
    }

    for (double snr_db : c.snr_list_db) {
      const double snr = detail::effective_snr(c, snr_db);
      if (want_digital) {
        std::vector<CMatrix> precoders;
        precoders.reserve(c.K);
        for (const auto& h : ctx.channel.matrices)
          precoders.push_back(fully_digital_precoder(h, c.N_D, snr, c.power_mode));
        out.rows.push_back({"fully-digital", snr_db, -1, "rate_bps_hz",
                            spectral_efficiency(ctx.channel.matrices, precoders, snr,
                                                c.N_D),
                            seed});
      }
      if (want_abhbf) {
        const auto hp = design_hybrid_precoder(ctx.channel.matrices,
                                               ctx.channel.frequencies, c.fc, selection,
                                               c.N_D, c.power_mode, snr, c.rf_mode);
        out.rows.push_back({"abhbf", snr_db, -1, "rate_bps_hz",
                            spectral_efficiency(ctx.channel.matrices, hp.rf_stages,
                                                hp.baseband, snr, c.N_D),
                            seed});
      }
      if (want_sparse) {
        const std::vector<CMatrix> rf{sparse.rf};
        const std::vector<CMatrix> bb(c.K, sparse.baseband);
        out.rows.push_back({"sparse", snr_db, -1, "rate_bps_hz",
                            spectral_efficiency(ctx.channel.matrices, rf, bb, snr,
                                                c.N_D),
                            seed});
      }
    }
    return out;
  });
  return detail::finish(c, "rate-snr", std::move(outputs));
}

// Generic alias: the SNR-sweep experiment is the default end-to-end run.
inline ResultTable run_experiment(const ScenarioConfig& c, int threads = 1) {
  return run_rate_snr(c, threads);
}

// ---------------------------------------------------------------------------
// rate-antennas: rates across square transmit arrays (mt_sweep), same trial
// seeds for every array size so path draws are directly comparable.
// ---------------------------------------------------------------------------
inline ResultTable run_rate_antennas(const ScenarioConfig& c, int threads = 1) {
  c.validate();
  detail::check_schemes(c);

  struct SweepPoint {
    int m_t;
    ScenarioConfig config;
    BeamSelection selection;
    CMatrix dict;
    int sparse_n_rf;
  };
  std::vector<SweepPoint> sweep;
  for (int m_t : c.mt_sweep) {
    const int side = static_cast<int>(std::lround(std::sqrt(double(m_t))));
    if (side * side != m_t)
      throw ConfigError("mt_sweep: values must be perfect squares, got " +
                        std::to_string(m_t));
    SweepPoint p{m_t, c, {}, {}, 0};
    p.config.tx_geometry = {side, side};
    const auto grid = quantized_grid(p.config.tx_geometry);
    p.selection = select_angle_pairs(build_support(c.paths), grid, c.max_beams);
    if (detail::has_scheme(c, "abhbf") && p.selection.size() < c.N_D)
      throw ConfigError("N_D: exceeds the realized beam count at m_t = " +
                        std::to_string(m_t));
    p.sparse_n_rf = c.sparse_n_rf.value_or(std::max(p.selection.size(), c.N_D));
    p.dict = grid_steering_matrix(grid) / std::sqrt(double(m_t));
    sweep.push_back(std::move(p));
  }

  auto outputs = detail::run_trials(c.trials, c.seed, threads, [&](int trial,
                                                                   std::uint64_t seed) {
    detail::TrialOutput out;
    auto n_t_meta = nlohmann::json::object();
    for (const auto& point : sweep) {
      const auto ctx = detail::make_trial_context(point.config, seed);
      n_t_meta[std::to_string(point.m_t)] = point.selection.size();
      char metric[48];
      std::snprintf(metric, sizeof(metric), "rate_bps_hz[m_t=%d]", point.m_t);
      for (double snr_db : c.snr_list_db) {
        const double snr = detail::effective_snr(point.config, snr_db);
        if (detail::has_scheme(c, "fully-digital")) {
          std::vector<CMatrix> precoders;
          for (const auto& h : ctx.channel.matrices)
            precoders.push_back(fully_digital_precoder(h, c.N_D, snr, c.power_mode));
          out.rows.push_back({"fully-digital", snr_db, -1, metric,
                              spectral_efficiency(ctx.channel.matrices, precoders, snr,
                                                  c.N_D),
                              seed});
        }
        if (detail::has_scheme(c, "abhbf")) {
          const auto hp = design_hybrid_precoder(
              ctx.channel.matrices, ctx.channel.frequencies, point.config.fc,
              point.selection, c.N_D, c.power_mode, snr, c.rf_mode);
          out.rows.push_back({"abhbf", snr_db, -1, metric,
                              spectral_efficiency(ctx.channel.matrices, hp.rf_stages,
                                                  hp.baseband, snr, c.N_D),
                              seed});
        }
        if (detail::has_scheme(c, "sparse")) {
          const auto sparse =
              spatially_sparse_omp(ctx.h_carrier, point.dict, point.sparse_n_rf, c.N_D);
          const std::vector<CMatrix> rf{sparse.rf};
          const std::vector<CMatrix> bb(point.config.K, sparse.baseband);
          out.rows.push_back({"sparse", snr_db, -1, metric,
                              spectral_efficiency(ctx.channel.matrices, rf, bb, snr,
                                                  c.N_D),
                              seed});
        }
      }
    }
    out.meta = {{"trial", trial}, {"seed", seed}, {"n_t", n_t_meta}};
    return out;
  });
  return detail::finish(c, "rate-antennas", std::move(outputs));
}

// ---------------------------------------------------------------------------
// gain-3d: normalized array gain over (subcarrier, elevation) for the
// conventional narrowband beamformer and the AB-HBF RF stage.
// ---------------------------------------------------------------------------
inline ResultTable run_gain_3d(const ScenarioConfig& c, int threads = 1) {
  c.validate();
  detail::check_schemes(c);
  const auto grid = quantized_grid(c.tx_geometry);
  const auto selection = select_angle_pairs(build_support(c.paths), grid, c.max_beams);
  const PathSpec& anchor = c.paths.front();

  auto outputs = detail::run_trials(c.trials, c.seed, threads, [&](int trial,
                                                                   std::uint64_t seed) {
    const auto ctx = detail::make_trial_context(c, seed);
    const PathParams& los = ctx.channel.paths.front();
    const CMatrix rf = rf_beamformer(selection);
    const CVector w = conventional_narrowband_beamformer(los, c.tx_geometry);

    detail::TrialOutput out;
    out.meta = {{"trial", trial}, {"seed", seed}, {"n_t", selection.size()}};
    for (int i = 0; i < c.sweep_points; ++i) {
      const double theta = anchor.theta - c.sweep_half_width +
                           2.0 * c.sweep_half_width * i / (c.sweep_points - 1);
      if (theta < 0.0 || theta > pi / 2) continue;
      const std::string metric = "gain[" + detail::angle_tag("theta_deg", theta) + "]";
      for (int k = 0; k < c.K; ++k) {
        const double f = ctx.channel.frequencies[k];
        if (detail::has_scheme(c, "conventional"))
          out.rows.push_back({"conventional", 0.0, k + 1, metric,
                              exact_array_gain(w, c.tx_geometry, theta, anchor.psi, f,
                                               c.fc),
                              seed});
        if (detail::has_scheme(c, "abhbf"))
          out.rows.push_back({"abhbf", 0.0, k + 1, metric,
                              projection_gain(rf, c.tx_geometry, theta, anchor.psi, f,
                                              c.fc),
                              seed});
      }
    }
    return out;
  });
  return detail::finish(c, "gain-3d", std::move(outputs));
}

// ---------------------------------------------------------------------------
// gain-spread: AB-HBF gain profiles toward the true LoS path for each design
// spread in the sweep; the channel draw uses the same spread, so each sweep
// value is a self-consistent scenario.
// ---------------------------------------------------------------------------
inline ResultTable run_gain_spread(const ScenarioConfig& c, int threads = 1) {
  c.validate();

  struct SweepPoint {
    double spread_deg;
    ScenarioConfig config;
    BeamSelection selection;
  };
  std::vector<SweepPoint> sweep;
  for (double spread_deg : c.spread_sweep_deg) {
    SweepPoint p{spread_deg, c, {}};
    for (auto& path : p.config.paths) {
      path.theta_spread = path.psi_spread = spread_deg * pi / 180.0;
      path.rx_theta_spread = path.rx_psi_spread = spread_deg * pi / 180.0;
    }
    p.config.validate();
    const auto grid = quantized_grid(c.tx_geometry);
    p.selection = select_angle_pairs(build_support(p.config.paths), grid, c.max_beams);
    sweep.push_back(std::move(p));
  }

  auto outputs = detail::run_trials(c.trials, c.seed, threads, [&](int trial,
                                                                   std::uint64_t seed) {
    detail::TrialOutput out;
    auto n_t_meta = nlohmann::json::object();
    for (const auto& point : sweep) {
      RandomStream rng(seed);
      const auto paths = sample_paths(point.config, rng);
      const PathParams& los = paths.front();
      const CMatrix rf = rf_beamformer(point.selection);
      char metric[48];
      std::snprintf(metric, sizeof(metric), "gain[spread_deg=%.4f]", point.spread_deg);
      const auto freqs = subcarrier_frequencies(c.fc, c.bandwidth, c.K);
      for (int k = 0; k < c.K; ++k)
        out.rows.push_back({"abhbf", 0.0, k + 1, metric,
                            projection_gain(rf, c.tx_geometry, los.theta_t, los.psi_t,
                                            freqs[k], c.fc),
                            seed});
      char key[32];
      std::snprintf(key, sizeof(key), "%.4f", point.spread_deg);
      n_t_meta[key] = point.selection.size();
    }
    out.meta = {{"trial", trial}, {"seed", seed}, {"n_t", n_t_meta}};
    return out;
  });
  return detail::finish(c, "gain-spread", std::move(outputs));
}

// ---------------------------------------------------------------------------
// gain-cuts: elevation and azimuth cuts of the AB-HBF gain at a few
// subcarriers (default first, center, last).
// ---------------------------------------------------------------------------
inline ResultTable run_gain_cuts(const ScenarioConfig& c, int threads = 1) {
  c.validate();
  detail::check_schemes(c);
  const auto grid = quantized_grid(c.tx_geometry);
  const auto selection = select_angle_pairs(build_support(c.paths), grid, c.max_beams);
  const PathSpec& anchor = c.paths.front();

  std::vector<int> cuts = c.cut_subcarriers;
  if (cuts.empty()) cuts = {1, (c.K + 1) / 2, c.K};
  for (int k : cuts)
    if (k < 1 || k > c.K) throw ConfigError("cut_subcarriers: index out of range");

  auto outputs = detail::run_trials(c.trials, c.seed, threads, [&](int trial,
                                                                   std::uint64_t seed) {
    const auto ctx = detail::make_trial_context(c, seed);
    const CMatrix rf = rf_beamformer(selection);
    const CVector w =
        conventional_narrowband_beamformer(ctx.channel.paths.front(), c.tx_geometry);

    detail::TrialOutput out;
    out.meta = {{"trial", trial}, {"seed", seed}, {"n_t", selection.size()}};
    const auto emit = [&](const std::string& metric, double theta, double psi, int k) {
      const double f = ctx.channel.frequencies[k - 1];
      if (detail::has_scheme(c, "abhbf"))
        out.rows.push_back({"abhbf", 0.0, k, metric,
                            projection_gain(rf, c.tx_geometry, theta, psi, f, c.fc),
                            seed});
      if (detail::has_scheme(c, "conventional"))
        out.rows.push_back({"conventional", 0.0, k, metric,
                            exact_array_gain(w, c.tx_geometry, theta, psi, f, c.fc),
                            seed});
    };
    for (int i = 0; i < c.sweep_points; ++i) {
      const double offset = -c.sweep_half_width +
                            2.0 * c.sweep_half_width * i / (c.sweep_points - 1);
      const double theta = anchor.theta + offset;
      const double psi = anchor.psi + offset;
      for (int k : cuts) {
        if (theta >= 0.0 && theta <= pi / 2)
          emit("gain_el[" + detail::angle_tag("theta_deg", theta) + "]", theta,
               anchor.psi, k);
        emit("gain_az[" + detail::angle_tag("psi_deg", psi) + "]", anchor.theta, psi, k);
      }
    }
    return out;
  });
  return detail::finish(c, "gain-cuts", std::move(outputs));
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------
inline void emit_csv(const ResultTable& table, std::ostream& out) {
  out << "scheme,snr_db,subcarrier,metric,value,seed\n";
  for (const ResultRow& r : table.rows) {
    out << r.scheme << ',' << detail::format_value(r.snr_db) << ',';
    if (r.subcarrier < 0)
      out << "avg";
    else
      out << r.subcarrier;
    out << ',' << r.metric << ',' << detail::format_value(r.value) << ',' << r.seed
        << '\n';
  }
}

inline void write_results(const ResultTable& table, const std::string& csv_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open output file: " + csv_path);
  emit_csv(table, csv);
  csv.flush();
  if (!csv) throw std::runtime_error("write failed: " + csv_path);

  std::string meta_path = csv_path;
  const auto dot = meta_path.find_last_of('.');
  if (dot != std::string::npos && meta_path.find('/', dot) == std::string::npos)
    meta_path.resize(dot);
  meta_path += ".meta.json";
  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) throw std::runtime_error("cannot open output file: " + meta_path);
  meta << table.metadata.dump(2) << '\n';
  meta.flush();
  if (!meta) throw std::runtime_error("write failed: " + meta_path);
}

}  // namespace abhbf
