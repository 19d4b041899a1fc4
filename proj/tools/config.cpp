// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "sdsm/errors.hpp"

namespace sdsm::cli {

using nlohmann::json;

namespace {

void only_keys(const json& t, const char* table, std::initializer_list<const char*> keys) {
  if (!t.is_object()) throw ConfigError(std::string("'") + table + "' must be a table");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : t.items()) {
    if (!allowed.count(k)) throw ConfigError(std::string("unknown key '") + k + "' in '" + table + "'");
  }
}

template <typename T>
T get(const json& t, const char* key, T fallback) {
  if (!t.contains(key)) return fallback;
  try {
    return t.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type");
  }
}

std::size_t count(const json& t, const char* key, std::size_t fallback) {
  if (!t.contains(key)) return fallback;
  const json& v = t.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::pair<double, double> deg_range(const json& t, const char* key, std::pair<double, double> fallback_rad) {
  if (!t.contains(key)) return fallback_rad;
  const auto v = get<std::vector<double>>(t, key, {});
  if (v.size() != 2) throw ConfigError(std::string("'") + key + "' must be [low, high] in degrees");
  if (!(v[0] <= v[1])) throw ConfigError(std::string("'") + key + "' bounds are reversed");
  return {deg2rad(v[0]), deg2rad(v[1])};
}

void parse_array(const json& a, bool two_d, UlaGeometry& ula, UpaGeometry& upa) {
  if (two_d) {
    only_keys(a, "array", {"n1", "n2", "spacing_ratio_1", "spacing_ratio_2"});
    upa.n1 = count(a, "n1", upa.n1);
    upa.n2 = count(a, "n2", upa.n2);
    upa.spacing_ratio_1 = get(a, "spacing_ratio_1", upa.spacing_ratio_1);
    upa.spacing_ratio_2 = get(a, "spacing_ratio_2", upa.spacing_ratio_2);
  } else {
    only_keys(a, "array", {"n_antennas", "spacing_ratio"});
    ula.n_antennas = count(a, "n_antennas", ula.n_antennas);
    ula.spacing_ratio = get(a, "spacing_ratio", ula.spacing_ratio);
  }
}

bool parse_dimension(const json& t) {
  const auto d = get<std::string>(t, "dimension", "1d");
  if (d != "1d" && d != "2d") throw ConfigError("dimension must be \"1d\" or \"2d\"");
  return d == "2d";
}

std::pair<std::size_t, std::size_t> pair_of_counts(const json& t, const char* key,
                                                   std::pair<std::size_t, std::size_t> fallback) {
  if (!t.contains(key)) return fallback;
  const auto v = get<std::vector<long long>>(t, key, {});
  if (v.size() != 2 || v[0] < 0 || v[1] < 0) {
    throw ConfigError(std::string("'") + key + "' must be two non-negative integers");
  }
  return {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
}

template <typename Fn>
auto wrap_domain(Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

DesignRequest parse_design(const json& t) {
  only_keys(t, "design",
            {"mode", "dimension", "m_levels", "order", "orders", "array", "sector", "r_min", "r_max",
             "samples", "grid", "rho", "noise_var", "users", "tol", "center_omega", "omegas"});
  DesignRequest r;
  const auto mode = get<std::string>(t, "mode", "fixed-sector");
  r.m_levels = get(t, "m_levels", 5);
  r.two_d = parse_dimension(t);
  if (mode == "first-order") {
    r.kind = DesignRequest::Kind::FirstOrder;
  } else if (mode == "second-order") {
    r.kind = DesignRequest::Kind::SecondOrder;
  } else if (mode == "band-stop") {
    r.kind = DesignRequest::Kind::BandStop;
    r.order = count(t, "order", 1);
    r.center = get(t, "center_omega", 0.0);
  } else if (mode == "zero-noise") {
    r.kind = DesignRequest::Kind::ZeroNoise;
    r.omegas = get<std::vector<double>>(t, "omegas", {});
    if (r.omegas.empty()) throw ConfigError("zero-noise design needs a non-empty 'omegas' list (radians)");
  } else if (mode == "fixed-sector" || mode == "user-targeted") {
    DesignSpec& s = r.spec;
    s.mode = mode == "fixed-sector" ? DesignMode::FixedSector : DesignMode::UserTargeted;
    s.two_d = r.two_d;
    s.m_levels = r.m_levels;
    if (s.two_d) {
      const auto o = pair_of_counts(t, "orders", {5, 5});
      s.order_1 = o.first;
      s.order_2 = o.second;
      s.upa = {40, 40, 0.25, 0.25};
    } else {
      s.order_1 = count(t, "order", 16);
      s.ula = {1024, 0.25};
    }
    if (t.contains("array")) parse_array(t.at("array"), s.two_d, s.ula, s.upa);
    if (t.contains("sector")) {
      const json& sec = t.at("sector");
      only_keys(sec, "sector", {"theta_deg", "phi_deg"});
      s.theta_range = deg_range(sec, "theta_deg", s.theta_range);
      s.phi_range = deg_range(sec, "phi_deg", {0.0, deg2rad(20.0)});
    } else if (s.two_d) {
      s.phi_range = {0.0, deg2rad(20.0)};
    }
    s.r_min = get(t, "r_min", 1.0);
    s.r_max = get(t, "r_max", 1.0);
    s.samples = count(t, "samples", 0);
    const auto grid = pair_of_counts(t, "grid", {33, 33});
    s.grid_theta = grid.first;
    s.grid_phi = grid.second;
    s.ctx.rho = get(t, "rho", 1.0);
    s.ctx.noise_var = get(t, "noise_var", 0.0);
    s.ctx.n_effective = s.two_d ? s.upa.n_antennas() : s.ula.n_antennas;
    s.tol = get(t, "tol", 1e-8);
    if (t.contains("users")) {
      const json& us = t.at("users");
      if (!us.is_array()) throw ConfigError("'users' must be a list");
      for (const json& u : us) {
        only_keys(u, "users[]", {"azimuth_deg", "elevation_deg", "gain_abs", "gain_phase_deg"});
        UserChannel c;
        c.azimuth = deg2rad(get(u, "azimuth_deg", 0.0));
        c.elevation = deg2rad(get(u, "elevation_deg", 0.0));
        c.gain = std::polar(get(u, "gain_abs", 1.0), deg2rad(get(u, "gain_phase_deg", 0.0)));
        s.users.push_back(c);
      }
    }
    wrap_domain([&] {
      s.validate();
      return 0;
    });
  } else {
    throw ConfigError("unknown design mode '" + mode + "'");
  }
  if (r.m_levels < 2) throw ConfigError("m_levels must be >= 2");
  return r;
}

ScenarioConfig parse_scenario(const json& t) {
  only_keys(t, "simulate",
            {"dimension", "array", "users", "sector", "min_separation_deg", "gain", "m_levels",
             "schemes", "snr_db", "symbols", "trials", "seed", "order", "orders", "design_samples",
             "grid", "design_tol", "max_redraws"});
  ScenarioConfig c;
  c.two_d = parse_dimension(t);
  if (t.contains("array")) parse_array(t.at("array"), c.two_d, c.ula, c.upa);
  c.n_users = count(t, "users", c.n_users);
  if (t.contains("sector")) {
    const json& sec = t.at("sector");
    only_keys(sec, "sector", {"theta_deg", "phi_deg"});
    c.theta_range = deg_range(sec, "theta_deg", c.theta_range);
    c.phi_range = deg_range(sec, "phi_deg", c.phi_range);
  }
  c.min_separation = deg2rad(get(t, "min_separation_deg", 1.0));
  if (t.contains("gain")) {
    const json& g = t.at("gain");
    only_keys(g, "gain", {"r0", "r1"});
    c.r0 = get(g, "r0", c.r0);
    if (g.contains("r1")) {
      const auto r1 = get<std::vector<double>>(g, "r1", {});
      if (r1.size() != 2) throw ConfigError("'gain.r1' must be [low, high]");
      c.r1_min = r1[0];
      c.r1_max = r1[1];
    }
  }
  c.m_levels = get(t, "m_levels", c.m_levels);
  if (t.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : get<std::vector<std::string>>(t, "schemes", {})) c.schemes.push_back(parse_scheme(s));
  }
  c.snr_db = get(t, "snr_db", c.snr_db);
  c.symbols = count(t, "symbols", c.symbols);
  c.trials = count(t, "trials", c.trials);
  if (t.contains("seed")) {
    if (!t.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = t.at("seed").get<std::uint64_t>();
  }
  c.order = count(t, "order", c.order);
  const auto o = pair_of_counts(t, "orders", {c.order_1, c.order_2});
  c.order_1 = o.first;
  c.order_2 = o.second;
  c.design_samples = count(t, "design_samples", c.design_samples);
  const auto grid = pair_of_counts(t, "grid", {c.grid_theta, c.grid_phi});
  c.grid_theta = grid.first;
  c.grid_phi = grid.second;
  c.design_tol = get(t, "design_tol", c.design_tol);
  c.max_redraws = count(t, "max_redraws", c.max_redraws);
  c.validate();
  return c;
}

void apply_paper_scale(ScenarioConfig& cfg) {
  if (cfg.two_d) {
    cfg.upa.n1 = 60;
    cfg.upa.n2 = 60;
  } else {
    cfg.ula.n_antennas = 1024;
  }
  cfg.trials = 1000;
  cfg.symbols = 500;
}

SweepSpec parse_sweep(const json& t) {
  only_keys(t, "response", {"theta_deg", "points", "spacing_ratio", "phi_deg", "phi_points", "spacing_ratio_2"});
  SweepSpec s;
  if (t.contains("theta_deg")) {
    const auto r = deg_range(t, "theta_deg", {});
    s.theta_deg = {rad2deg(r.first), rad2deg(r.second)};
  }
  if (t.contains("phi_deg")) {
    const auto r = deg_range(t, "phi_deg", {});
    s.phi_deg = {rad2deg(r.first), rad2deg(r.second)};
  }
  s.points = count(t, "points", s.points);
  s.phi_points = count(t, "phi_points", s.phi_points);
  s.spacing_ratio = get(t, "spacing_ratio", s.spacing_ratio);
  s.spacing_ratio_2 = get(t, "spacing_ratio_2", s.spacing_ratio_2);
  return s;
}

AnalyzeSpec parse_analyze(const json& t) {
  only_keys(t, "analyze",
            {"what", "samples", "k_range", "l_range", "n_antennas", "trials", "omega_points", "m_levels"});
  AnalyzeSpec a;
  a.what = get<std::string>(t, "what", "");
  a.samples = count(t, "samples", a.samples);
  std::tie(a.k_min, a.k_max) = pair_of_counts(t, "k_range", {a.k_min, a.k_max});
  std::tie(a.l_min, a.l_max) = pair_of_counts(t, "l_range", {a.l_min, a.l_max});
  a.n_antennas = count(t, "n_antennas", a.n_antennas);
  a.trials = count(t, "trials", a.trials);
  a.omega_points = count(t, "omega_points", a.omega_points);
  a.m_levels = get(t, "m_levels", a.m_levels);
  return a;
}

}  // namespace sdsm::cli
