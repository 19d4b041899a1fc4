// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "sdsm/analysis.hpp"
#include "sdsm/errors.hpp"
#include "sdsm/filter_designs.hpp"
#include "sdsm/serialize.hpp"

#ifndef SDSM_VERSION
#define SDSM_VERSION "0.0.0"
#endif

namespace sdsm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string tool_version() { return SDSM_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

namespace {

struct Common {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool paper_scale = false;
  bool timings = false;
};

// Outputs are buffered and written only once a command has fully succeeded.
class Outputs {
 public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

  void time(const std::string& phase, double ms) { timings_[phase] = ms; }

  // Timings go to the log; the manifest carries them only on request since they
  // differ between otherwise identical reruns.
  void commit(const Common& c, const std::string& command, const json& config_echo,
              std::optional<std::uint64_t> seed, std::ostream& log) const {
    json manifest;
    manifest["tool"] = "sdsm";
    manifest["version"] = tool_version();
    manifest["command"] = command;
    manifest["seed"] = seed ? json(*seed) : json(nullptr);
    manifest["config"] = config_echo;
    json outs = json::array();
    for (const auto& [name, content] : files_) {
      outs.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }
    manifest["outputs"] = outs;
    if (c.timings) manifest["timings_ms"] = timings_;
    fs::create_directories(c.out_dir);
    for (const auto& [name, content] : files_) write(fs::path(c.out_dir) / name, content);
    write(fs::path(c.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    for (const auto& [phase, ms] : timings_.items()) {
      log << "timing " << phase << ": " << ms.get<double>() << " ms\n";
    }
  }

 private:
  static void write(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  }

  std::vector<std::pair<std::string, std::string>> files_;
  json timings_ = json::object();
};

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string csv_header(const std::string& what) { return "# sdsm " + tool_version() + " " + what + "\n"; }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json table_or_empty(const Common& c, const char* name, bool required) {
  if (c.config.empty()) {
    if (required) throw ConfigError(std::string("--config is required for this command"));
    return json::object();
  }
  const json doc = load_json(c.config);
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (!doc.contains(name)) {
    if (required) throw ConfigError(std::string("config has no '") + name + "' table");
    return json::object();
  }
  return doc.at(name);
}

// ------------------------------------------------------------------ design

int cmd_design(const Common& c, std::ostream& out) {
  const json table = table_or_empty(c, "design", true);
  const DesignRequest req = parse_design(table);
  Stopwatch sw;
  json doc;
  switch (req.kind) {
    case DesignRequest::Kind::Optimized: {
      const DesignReport rep = design(req.spec);
      doc = report_to_json(rep);
      out << "design: " << rep.solution.iterations << " solver iterations, A = " << num(rep.design.amplitude())
          << ", ||g||_IQ-1 = " << num(rep.design.coeff_iq1()) << ", worst target RNSR "
          << num(to_db_floored(rep.worst_target_rnsr)) << " dB, min SQNR " << num(rep.min_sqnr.db())
          << " dB\n";
      break;
    }
    case DesignRequest::Kind::FirstOrder:
      doc["design"] = design_to_json(req.two_d ? first_order_2d(req.m_levels) : first_order(req.m_levels));
      break;
    case DesignRequest::Kind::SecondOrder:
      doc["design"] = design_to_json(second_order(req.m_levels));
      break;
    case DesignRequest::Kind::BandStop:
      doc["design"] = design_to_json(band_stop(req.order, req.center, req.m_levels));
      break;
    case DesignRequest::Kind::ZeroNoise: {
      const CVector g = zero_noise_coeffs(req.omegas);
      const double a = max_safe_amplitude(iq_norm1(g), req.m_levels);
      doc["design"] = design_to_json(FilterDesign::one_d(g, a, req.m_levels));
      break;
    }
  }
  Outputs o;
  o.time("design", sw.ms());
  o.add("design.json", doc.dump(2) + "\n");
  o.commit(c, "design", table, std::nullopt, out);
  out << "wrote " << (fs::path(c.out_dir) / "design.json").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- response

struct ResponseFlags {
  std::string design;
  std::optional<std::size_t> points;
  std::optional<std::size_t> phi_points;
  std::optional<double> spacing;
  std::optional<double> spacing_2;
  std::vector<double> theta_range;
  std::vector<double> phi_range;
};

int cmd_response(const Common& c, const ResponseFlags& f, std::ostream& out) {
  if (f.design.empty()) throw ConfigError("--design is required");
  const json table = table_or_empty(c, "response", false);
  SweepSpec s = parse_sweep(table);
  if (f.points) s.points = *f.points;
  if (f.phi_points) s.phi_points = *f.phi_points;
  if (f.spacing) s.spacing_ratio = *f.spacing;
  if (f.spacing_2) s.spacing_ratio_2 = *f.spacing_2;
  if (!f.theta_range.empty()) s.theta_deg = {f.theta_range[0], f.theta_range[1]};
  if (!f.phi_range.empty()) s.phi_deg = {f.phi_range[0], f.phi_range[1]};
  if (s.points == 0 || s.phi_points == 0) throw ConfigError("sweep needs at least one point");
  if (!(s.theta_deg.first <= s.theta_deg.second) || !(s.phi_deg.first <= s.phi_deg.second)) {
    throw ConfigError("sweep ranges must be ordered");
  }

  json doc = load_json(f.design);
  if (doc.is_object() && doc.contains("design")) doc = doc.at("design");
  const FilterDesign d = design_from_json(doc);

  // Endpoints at +-90 degrees are outside the open angle domain; pull them in.
  constexpr double kEdge = 90.0 - 1e-9;
  auto clamp_deg = [&](double v) { return deg2rad(std::clamp(v, -kEdge, kEdge)); };
  std::vector<double> thetas = linspace(s.theta_deg.first, s.theta_deg.second, s.points);
  for (auto& t : thetas) t = clamp_deg(t);

  Stopwatch sw;
  std::ostringstream csv;
  csv << csv_header("rnsr");
  std::vector<RnsrPoint> sweep;
  if (d.is_2d()) {
    std::vector<double> phis = linspace(s.phi_deg.first, s.phi_deg.second, s.phi_points);
    for (auto& p : phis) p = clamp_deg(p);
    const UpaGeometry g{d.order_1() + 1, d.order_2() + 1, s.spacing_ratio, s.spacing_ratio_2};
    sweep = rnsr_sweep_2d(d, thetas, phis, g);
    csv << "theta_deg,phi_deg,rnsr_db\n";
    for (const auto& p : sweep) csv << num(rad2deg(p.theta)) << ',' << num(rad2deg(p.phi)) << ',' << num(p.db) << '\n';
  } else {
    sweep = rnsr_sweep(d, thetas, s.spacing_ratio);
    csv << "theta_deg,rnsr_db\n";
    for (const auto& p : sweep) csv << num(rad2deg(p.theta)) << ',' << num(p.db) << '\n';
  }
  Outputs o;
  o.time("sweep", sw.ms());
  o.add("response.csv", csv.str());
  json echo = {{"design", f.design},
               {"theta_deg", {s.theta_deg.first, s.theta_deg.second}},
               {"points", s.points},
               {"spacing_ratio", s.spacing_ratio}};
  if (d.is_2d()) {
    echo["phi_deg"] = {s.phi_deg.first, s.phi_deg.second};
    echo["phi_points"] = s.phi_points;
    echo["spacing_ratio_2"] = s.spacing_ratio_2;
  }
  o.commit(c, "response", echo, std::nullopt, out);
  out << "worst RNSR over sweep: " << num(to_db_floored(worst_rnsr(sweep))) << " dB\n";
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

double echo_deg(double rad) { return std::round(rad2deg(rad) * 1e9) / 1e9; }

json scenario_echo(const ScenarioConfig& cfg) {
  json j;
  j["dimension"] = cfg.two_d ? "2d" : "1d";
  if (cfg.two_d) {
    j["array"] = {{"n1", cfg.upa.n1}, {"n2", cfg.upa.n2}, {"spacing_ratio_1", cfg.upa.spacing_ratio_1},
                  {"spacing_ratio_2", cfg.upa.spacing_ratio_2}};
    j["sector"] = {{"theta_deg", {echo_deg(cfg.theta_range.first), echo_deg(cfg.theta_range.second)}},
                   {"phi_deg", {echo_deg(cfg.phi_range.first), echo_deg(cfg.phi_range.second)}}};
    j["orders"] = {cfg.order_1, cfg.order_2};
    j["grid"] = {cfg.grid_theta, cfg.grid_phi};
  } else {
    j["array"] = {{"n_antennas", cfg.ula.n_antennas}, {"spacing_ratio", cfg.ula.spacing_ratio}};
    j["sector"] = {{"theta_deg", {echo_deg(cfg.theta_range.first), echo_deg(cfg.theta_range.second)}}};
    j["order"] = cfg.order;
    j["design_samples"] = cfg.design_samples;
  }
  j["users"] = cfg.n_users;
  j["min_separation_deg"] = echo_deg(cfg.min_separation);
  j["gain"] = {{"r0", cfg.r0}, {"r1", {cfg.r1_min, cfg.r1_max}}};
  j["m_levels"] = cfg.m_levels;
  json schemes = json::array();
  for (Scheme s : cfg.schemes) schemes.push_back(std::string(scheme_name(s)));
  j["schemes"] = schemes;
  j["snr_db"] = cfg.snr_db;
  j["symbols"] = cfg.symbols;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["design_tol"] = cfg.design_tol;
  j["max_redraws"] = cfg.max_redraws;
  return j;
}

int cmd_simulate(const Common& c, std::ostream& out) {
  const json table = table_or_empty(c, "simulate", true);
  ScenarioConfig cfg = parse_scenario(table);
  if (c.paper_scale) apply_paper_scale(cfg);
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();

  Stopwatch sw;
  const BerReport rep = run_ber(cfg, c.threads);
  Outputs o;
  o.time("simulate", sw.ms());
  o.add("ber.csv", csv_header("ber") + rep.to_csv());
  json summary = ber_to_json(rep);
  summary["config"] = scenario_echo(cfg);
  o.add("ber.json", summary.dump(2) + "\n");
  o.commit(c, "simulate", scenario_echo(cfg), cfg.seed, out);
  for (const auto& p : rep.points) {
    out << scheme_name(p.scheme) << " @ " << num(p.snr_db) << " dB: BER " << num(p.ber()) << " ("
        << p.bit_errors << "/" << p.bits << ")\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------- analyze

int cmd_analyze(const Common& c, const std::string& what_flag, std::optional<std::size_t> samples,
                std::ostream& out) {
  AnalyzeSpec a = parse_analyze(table_or_empty(c, "analyze", false));
  if (!what_flag.empty()) a.what = what_flag;
  if (samples) a.samples = *samples;
  if (c.paper_scale) a.trials = std::max<std::size_t>(a.trials, 1000);
  const std::uint64_t seed = c.seed.value_or(1);
  if (a.samples == 0) throw ConfigError("samples must be positive");

  Outputs o;
  Stopwatch sw;
  std::ostringstream csv;
  json echo = {{"what", a.what}, {"seed", seed}};
  if (a.what == "table1") {
    if (a.k_min == 0 || a.k_min > a.k_max) throw ConfigError("k_range must satisfy 1 <= k_min <= k_max");
    echo["samples"] = a.samples;
    echo["k_range"] = {a.k_min, a.k_max};
    csv << csv_header("table1") << "k,min,mean,rms,max,n_samples,reference_mean,reference_rms,rms_lower,rms_upper\n";
    for (std::size_t k = a.k_min; k <= a.k_max; ++k) {
      const NormStats st = table1_stats(k, a.samples, seed, c.threads);
      std::string pm = "", pr = "";
      for (const auto& ref : kTable1Reference) {
        if (ref.k == k) {
          pm = num(ref.mean);
          pr = num(ref.rms);
        }
      }
      csv << k << ',' << num(st.min) << ',' << num(st.mean) << ',' << num(st.rms) << ',' << num(st.max) << ','
          << st.n_samples << ',' << pm << ',' << pr << ',' << num(std::pow(2.0, (static_cast<double>(k) - 1) / 2))
          << ',' << num(std::pow(2.0, static_cast<double>(k))) << '\n';
      out << "K=" << k << " mean " << num(st.mean) << " rms " << num(st.rms) << "\n";
    }
    o.add("table1.csv", csv.str());
  } else if (a.what == "bounds") {
    if (a.l_min == 0 || a.l_min > a.l_max) throw ConfigError("l_range must satisfy 1 <= l_min <= l_max");
    echo["samples"] = a.samples;
    echo["l_range"] = {a.l_min, a.l_max};
    csv << csv_header("bounds") << "order,lower,min_norm,max_norm,upper,norm_at_zero,n_samples\n";
    for (std::size_t l = a.l_min; l <= a.l_max; ++l) {
      const BandStopBounds b = band_stop_bounds(l, a.samples, seed);
      csv << l << ',' << num(b.lower) << ',' << num(b.min_norm) << ',' << num(b.max_norm) << ',' << num(b.upper)
          << ',' << num(b.norm_at_zero) << ',' << b.n_samples << '\n';
    }
    o.add("bounds.csv", csv.str());
  } else if (a.what == "noise-model") {
    if (a.m_levels < 2) throw ConfigError("m_levels must be >= 2");
    if (a.n_antennas == 0 || a.trials == 0 || a.omega_points == 0) {
      throw ConfigError("noise-model needs positive n_antennas, trials and omega_points");
    }
    echo["n_antennas"] = a.n_antennas;
    echo["trials"] = a.trials;
    echo["omega_points"] = a.omega_points;
    echo["m_levels"] = a.m_levels;
    const std::vector<double> omegas = linspace(-2.0, 2.0, a.omega_points);
    const std::pair<const char*, FilterDesign> designs[] = {
        {"first-order", first_order(a.m_levels)},
        {"unshaped", FilterDesign::one_d(CVector::Zero(1), static_cast<double>(a.m_levels), a.m_levels)},
    };
    csv << csv_header("noise-model") << "design,omega,empirical,predicted,ratio_db,excluded\n";
    for (const auto& [name, d] : designs) {
      const NoiseModelReport r = validate_noise_model(d, omegas, a.n_antennas, a.trials, seed, c.threads);
      for (const auto& p : r.points) {
        csv << name << ',' << num(p.omega) << ',' << num(p.empirical) << ',' << num(p.predicted) << ','
            << num(p.ratio_db) << ',' << (p.excluded ? 1 : 0) << '\n';
      }
      out << name << ": pooled ratio " << num(r.pooled_ratio_db) << " dB\n";
    }
    o.add("noise_model.csv", csv.str());
  } else {
    throw ConfigError("unknown analysis '" + a.what + "' (expected table1, noise-model or bounds)");
  }
  o.time("analyze", sw.ms());
  o.commit(c, "analyze", echo, seed, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial Sigma-Delta precoding: designs, responses, BER campaigns, analyses", "sdsm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  Common c;
  app.add_option("--config", c.config, "JSON configuration file");
  app.add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "master seed (overrides the config)");
  app.add_option("--threads", c.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_flag("--paper-scale", c.paper_scale, "full-scale array size and trial counts");
  app.add_flag("--timings", c.timings, "record wall-clock timings in manifest.json");

  auto* design_cmd = app.add_subcommand("design", "build a noise-shaping design");
  auto* response_cmd = app.add_subcommand("response", "tabulate the relative noise-shaping response");
  ResponseFlags rf;
  response_cmd->add_option("--design", rf.design, "design JSON (output of `design`)");
  response_cmd->add_option("--points", rf.points, "number of azimuth samples");
  response_cmd->add_option("--phi-points", rf.phi_points, "number of elevation samples (2D)");
  response_cmd->add_option("--spacing", rf.spacing, "d / lambda (2D: horizontal)");
  response_cmd->add_option("--spacing-2", rf.spacing_2, "vertical d / lambda (2D)");
  response_cmd->add_option("--theta-range", rf.theta_range, "azimuth range in degrees")->expected(2);
  response_cmd->add_option("--phi-range", rf.phi_range, "elevation range in degrees (2D)")->expected(2);
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo BER campaign");
  auto* analyze_cmd = app.add_subcommand("analyze", "table1 | noise-model | bounds");
  std::string what;
  std::optional<std::size_t> samples;
  analyze_cmd->add_option("what", what, "table1, noise-model or bounds");
  analyze_cmd->add_option("--samples", samples, "random draws per row");
  for (auto* sc : {design_cmd, response_cmd, simulate_cmd, analyze_cmd}) sc->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (design_cmd->parsed()) return cmd_design(c, out);
    if (response_cmd->parsed()) return cmd_response(c, rf, out);
    if (simulate_cmd->parsed()) return cmd_simulate(c, out);
    return cmd_analyze(c, what, samples, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "file error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace sdsm::cli
