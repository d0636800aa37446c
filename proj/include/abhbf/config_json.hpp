// SPDX-License-Identifier: Apache-2.0
//
// JSON scenario configs. Angles live in degrees in the file and radians in
// ScenarioConfig. Unknown keys are an error (typo protection), so every
// recognized key must be listed here.

#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "abhbf/scenario.hpp"

namespace abhbf {

namespace detail {

inline constexpr double kDegToRad = pi / 180.0;

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& item : j.items())
    if (!known.contains(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <typename T>
T require(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(key + ": required key missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key + ": wrong type");
  }
}

template <typename T>
T optional(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key + ": wrong type");
  }
}

inline UraGeometry parse_geometry(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(key + ": required key missing");
  const auto& g = j.at(key);
  reject_unknown_keys(g, {"m_x", "m_y"}, key);
  return UraGeometry(require<int>(g, "m_x"), require<int>(g, "m_y"));
}

inline PathSpec parse_path(const nlohmann::json& j, const std::string& where) {
  reject_unknown_keys(j,
                      {"theta_deg", "psi_deg", "theta_spread_deg", "psi_spread_deg",
                       "rx_theta_deg", "rx_psi_deg", "rx_theta_spread_deg",
                       "rx_psi_spread_deg"},
                      where);
  PathSpec p;
  p.theta = require<double>(j, "theta_deg") * kDegToRad;
  p.psi = require<double>(j, "psi_deg") * kDegToRad;
  p.theta_spread = optional<double>(j, "theta_spread_deg", 0.0) * kDegToRad;
  p.psi_spread = optional<double>(j, "psi_spread_deg", 0.0) * kDegToRad;
  p.rx_theta = optional<double>(j, "rx_theta_deg", p.theta / kDegToRad) * kDegToRad;
  p.rx_psi = optional<double>(j, "rx_psi_deg", p.psi / kDegToRad) * kDegToRad;
  p.rx_theta_spread =
      optional<double>(j, "rx_theta_spread_deg", p.theta_spread / kDegToRad) * kDegToRad;
  p.rx_psi_spread =
      optional<double>(j, "rx_psi_spread_deg", p.psi_spread / kDegToRad) * kDegToRad;
  return p;
}

inline AbsorptionModel parse_absorption(const nlohmann::json& j) {
  if (!j.contains("absorption") || j.at("absorption").is_null())
    return AbsorptionModel::none();
  const auto& a = j.at("absorption");
  if (a.is_number()) return AbsorptionModel::constant(a.get<double>());
  if (a.is_array()) {
    std::vector<double> freqs, coeffs;
    for (const auto& row : a) {
      if (!row.is_array() || row.size() != 2)
        throw ConfigError("absorption: table rows must be [frequency_hz, tau_per_m]");
      freqs.push_back(row[0].get<double>());
      coeffs.push_back(row[1].get<double>());
    }
    return AbsorptionModel::table(std::move(freqs), std::move(coeffs));
  }
  throw ConfigError("absorption: must be null, a number, or a table");
}

}  // namespace detail

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  using detail::kDegToRad;
  detail::reject_unknown_keys(
      j, {"fc",         "bandwidth",     "K",
          "tx_geometry", "rx_geometry",  "L",
          "d_T",         "paths",        "snr_list",
          "N_D",         "power_mode",   "rf_mode",
          "max_beams",   "trials",       "seed",
          "absorption",  "nlos_delay_spread", "nlos_min_loss",
          "schemes",     "sparse_n_rf",  "spread_sweep_deg",
          "mt_sweep",    "cut_subcarriers", "sweep_half_width_deg",
          "sweep_points"},
      "config");

  ScenarioConfig c;
  c.fc = detail::require<double>(j, "fc");
  c.bandwidth = detail::require<double>(j, "bandwidth");
  c.K = detail::require<int>(j, "K");
  c.tx_geometry = detail::parse_geometry(j, "tx_geometry");
  c.rx_geometry = detail::parse_geometry(j, "rx_geometry");
  c.d_T = detail::require<double>(j, "d_T");
  c.N_D = detail::require<int>(j, "N_D");
  c.seed = detail::require<std::uint64_t>(j, "seed");

  if (!j.contains("paths") || !j.at("paths").is_array() || j.at("paths").empty())
    throw ConfigError("paths: non-empty array required");
  int i = 0;
  for (const auto& p : j.at("paths"))
    c.paths.push_back(detail::parse_path(p, "paths[" + std::to_string(i++) + "]"));
  if (j.contains("L") && j.at("L").get<int>() != c.num_paths())
    throw ConfigError("L: does not match the number of path entries");

  c.snr_list_db = detail::optional<std::vector<double>>(j, "snr_list", {0.0});
  const std::string power = detail::optional<std::string>(j, "power_mode", "waterfilling");
  if (power == "waterfilling") c.power_mode = PowerMode::kWaterfilling;
  else if (power == "equal") c.power_mode = PowerMode::kEqual;
  else throw ConfigError("power_mode: must be 'waterfilling' or 'equal'");
  const std::string rf = detail::optional<std::string>(j, "rf_mode", "carrier-flat");
  if (rf == "carrier-flat") c.rf_mode = RfMode::kCarrierFlat;
  else if (rf == "per-subcarrier") c.rf_mode = RfMode::kPerSubcarrier;
  else throw ConfigError("rf_mode: must be 'carrier-flat' or 'per-subcarrier'");
  if (j.contains("max_beams") && !j.at("max_beams").is_null())
    c.max_beams = j.at("max_beams").get<int>();
  c.trials = detail::optional<int>(j, "trials", 1);
  c.absorption = detail::parse_absorption(j);
  c.nlos_delay_spread = detail::optional<double>(j, "nlos_delay_spread", c.nlos_delay_spread);
  c.nlos_min_loss = detail::optional<double>(j, "nlos_min_loss", c.nlos_min_loss);
  c.schemes = detail::optional<std::vector<std::string>>(j, "schemes", c.schemes);
  if (j.contains("sparse_n_rf") && !j.at("sparse_n_rf").is_null())
    c.sparse_n_rf = j.at("sparse_n_rf").get<int>();
  c.spread_sweep_deg =
      detail::optional<std::vector<double>>(j, "spread_sweep_deg", c.spread_sweep_deg);
  c.mt_sweep = detail::optional<std::vector<int>>(j, "mt_sweep", c.mt_sweep);
  c.cut_subcarriers =
      detail::optional<std::vector<int>>(j, "cut_subcarriers", c.cut_subcarriers);
  c.sweep_half_width =
      detail::optional<double>(j, "sweep_half_width_deg", c.sweep_half_width / kDegToRad) *
      kDegToRad;
  c.sweep_points = detail::optional<int>(j, "sweep_points", c.sweep_points);

  c.validate();
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not readable: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// Canonical serialization of the effective config (defaults materialized,
// CLI overrides applied). Feeds the config hash, so key order and number
// formatting must stay deterministic — nlohmann sorts object keys.
inline nlohmann::json config_to_json(const ScenarioConfig& c) {
  using detail::kDegToRad;
  nlohmann::json j;
  j["fc"] = c.fc;
  j["bandwidth"] = c.bandwidth;
  j["K"] = c.K;
  j["tx_geometry"] = {{"m_x", c.tx_geometry.m_x}, {"m_y", c.tx_geometry.m_y}};
  j["rx_geometry"] = {{"m_x", c.rx_geometry.m_x}, {"m_y", c.rx_geometry.m_y}};
  j["L"] = c.num_paths();
  j["d_T"] = c.d_T;
  j["paths"] = nlohmann::json::array();
  for (const auto& p : c.paths)
    j["paths"].push_back({{"theta_deg", p.theta / kDegToRad},
                          {"psi_deg", p.psi / kDegToRad},
                          {"theta_spread_deg", p.theta_spread / kDegToRad},
                          {"psi_spread_deg", p.psi_spread / kDegToRad},
                          {"rx_theta_deg", p.rx_theta / kDegToRad},
                          {"rx_psi_deg", p.rx_psi / kDegToRad},
                          {"rx_theta_spread_deg", p.rx_theta_spread / kDegToRad},
                          {"rx_psi_spread_deg", p.rx_psi_spread / kDegToRad}});
  j["snr_list"] = c.snr_list_db;
  j["N_D"] = c.N_D;
  j["power_mode"] = c.power_mode == PowerMode::kWaterfilling ? "waterfilling" : "equal";
  j["rf_mode"] = c.rf_mode == RfMode::kCarrierFlat ? "carrier-flat" : "per-subcarrier";
  j["max_beams"] = c.max_beams ? nlohmann::json(*c.max_beams) : nlohmann::json(nullptr);
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  if (c.absorption.is_zero()) {
    j["absorption"] = nullptr;
  } else {
    auto table = nlohmann::json::array();
    for (std::size_t i = 0; i < c.absorption.frequencies().size(); ++i)
      table.push_back({c.absorption.frequencies()[i], c.absorption.coefficients()[i]});
    j["absorption"] = table;
  }
  j["nlos_delay_spread"] = c.nlos_delay_spread;
  j["nlos_min_loss"] = c.nlos_min_loss;
  j["schemes"] = c.schemes;
  j["sparse_n_rf"] = c.sparse_n_rf ? nlohmann::json(*c.sparse_n_rf) : nlohmann::json(nullptr);
  j["spread_sweep_deg"] = c.spread_sweep_deg;
  j["mt_sweep"] = c.mt_sweep;
  j["cut_subcarriers"] = c.cut_subcarriers;
  j["sweep_half_width_deg"] = c.sweep_half_width / kDegToRad;
  j["sweep_points"] = c.sweep_points;
  return j;
}

}  // namespace abhbf
