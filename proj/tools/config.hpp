// SPDX-License-Identifier: Apache-2.0
//
// Run configuration files. A config is a JSON object with one table per
// subcommand ("design", "simulate", "response", "analyze"). Angles are in
// degrees, SNRs in dB. Unknown keys are rejected.

#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sdsm/conic_design.hpp"
#include "sdsm/downlink.hpp"
#include "sdsm/modulator.hpp"

namespace sdsm::cli {

/// Reads and parses a JSON file. Throws ConfigError on I/O or syntax errors.
nlohmann::json load_json(const std::filesystem::path& path);

/// What a "design" table asks for: an optimized design or a closed form.
struct DesignRequest {
  enum class Kind { Optimized, FirstOrder, SecondOrder, BandStop, ZeroNoise };
  Kind kind = Kind::Optimized;
  DesignSpec spec;               ///< Optimized
  int m_levels = 5;              ///< closed forms
  bool two_d = false;            ///< FirstOrder
  std::size_t order = 1;         ///< BandStop
  double center = 0.0;           ///< BandStop omega_c, radians
  std::vector<double> omegas;    ///< ZeroNoise, radians
};

DesignRequest parse_design(const nlohmann::json& table);
ScenarioConfig parse_scenario(const nlohmann::json& table);

/// Full-scale array sizes and trial counts.
void apply_paper_scale(ScenarioConfig& cfg);

struct SweepSpec {
  std::pair<double, double> theta_deg{-90.0, 90.0};
  std::size_t points = 361;
  double spacing_ratio = 0.25;
  std::pair<double, double> phi_deg{-90.0, 90.0};
  std::size_t phi_points = 181;
  double spacing_ratio_2 = 0.25;
};

SweepSpec parse_sweep(const nlohmann::json& table);

struct AnalyzeSpec {
  std::string what;                 ///< table1 | noise-model | bounds
  std::size_t samples = 100000;     ///< table1, bounds
  std::size_t k_min = 2, k_max = 8; ///< table1
  std::size_t l_min = 1, l_max = 8; ///< bounds
  std::size_t n_antennas = 1024;    ///< noise-model
  std::size_t trials = 200;         ///< noise-model
  std::size_t omega_points = 37;    ///< noise-model, uniform on [-2, 2]
  int m_levels = 2;                 ///< noise-model
};

AnalyzeSpec parse_analyze(const nlohmann::json& table);

}  // namespace sdsm::cli
