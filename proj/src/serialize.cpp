// SPDX-License-Identifier: Apache-2.0

#include "sdsm/serialize.hpp"

#include <string>

#include "sdsm/analysis.hpp"
#include "sdsm/errors.hpp"

namespace sdsm {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("design JSON lacks '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("design JSON field '") + key + "': " + e.what());
  }
}

json split(const CVector& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return {re, im};
}

}  // namespace

json design_to_json(const FilterDesign& d) {
  json j;
  j["kind"] = d.is_2d() ? "2d" : "1d";
  j["m_levels"] = d.m_levels();
  j["amplitude"] = d.amplitude();
  j["coeff_iq1"] = d.coeff_iq1();
  j["overload_safe"] = d.overload_safe();
  if (!d.is_2d()) {
    j["order"] = d.order();
    const json s = split(d.coeffs());
    j["coeffs_re"] = s[0];
    j["coeffs_im"] = s[1];
    return j;
  }
  j["order_1"] = d.order_1();
  j["order_2"] = d.order_2();
  json re = json::array(), im = json::array();
  const CMatrix& g = d.coeffs_2d();
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    const json s = split(g.row(r).transpose());
    re.push_back(s[0]);
    im.push_back(s[1]);
  }
  j["coeffs_re"] = re;
  j["coeffs_im"] = im;
  return j;
}

FilterDesign design_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("design JSON must be an object");
  const auto kind = field<std::string>(j, "kind");
  const int m = field<int>(j, "m_levels");
  const double a = field<double>(j, "amplitude");
  try {
    if (kind == "1d") {
      const auto re = field<std::vector<double>>(j, "coeffs_re");
      const auto im = field<std::vector<double>>(j, "coeffs_im");
      if (re.size() != im.size()) throw ConfigError("coeffs_re and coeffs_im differ in length");
      CVector g(static_cast<Eigen::Index>(re.size()));
      for (std::size_t i = 0; i < re.size(); ++i) g[static_cast<Eigen::Index>(i)] = {re[i], im[i]};
      return FilterDesign::one_d(std::move(g), a, m);
    }
    if (kind == "2d") {
      const auto re = field<std::vector<std::vector<double>>>(j, "coeffs_re");
      const auto im = field<std::vector<std::vector<double>>>(j, "coeffs_im");
      if (re.empty() || re.size() != im.size()) throw ConfigError("2D coefficient grids differ in shape");
      CMatrix g(static_cast<Eigen::Index>(re.size()), static_cast<Eigen::Index>(re[0].size()));
      for (std::size_t r = 0; r < re.size(); ++r) {
        if (re[r].size() != re[0].size() || im[r].size() != re[0].size()) {
          throw ConfigError("2D coefficient grid is ragged");
        }
        for (std::size_t c = 0; c < re[r].size(); ++c) {
          g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {re[r][c], im[r][c]};
        }
      }
      return FilterDesign::two_d(std::move(g), a, m);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid design: ") + e.what());
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("invalid design: ") + e.what());
  }
  throw ConfigError("design kind must be \"1d\" or \"2d\", got \"" + kind + "\"");
}

json solution_to_json(const ConicSolution& s) {
  return {{"status", std::string(status_name(s.status))},
          {"iterations", s.iterations},
          {"objective", s.objective},
          {"xi", s.xi},
          {"primal_residual", s.primal_residual},
          {"dual_residual", s.dual_residual},
          {"gap", s.gap},
          {"relative_gap", s.relative_gap}};
}

json report_to_json(const DesignReport& r) {
  json j;
  j["design"] = design_to_json(r.design);
  j["solver"] = solution_to_json(r.solution);
  j["min_sqnr_db"] = r.min_sqnr.db();
  j["min_sqnr_unbounded"] = r.min_sqnr.is_unbounded();
  j["target_sqnr_db"] = r.target_sqnr_db;
  j["worst_target_rnsr_db"] = to_db_floored(r.worst_target_rnsr);
  return j;
}

json ber_to_json(const BerReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"scheme", std::string(scheme_name(p.scheme))},
                   {"snr_db", p.snr_db},
                   {"ber", p.ber()},
                   {"bit_errors", p.bit_errors},
                   {"bits", p.bits},
                   {"overloads", p.overloads}});
  }
  return {{"seed", r.seed},
          {"trials", r.trials},
          {"redraws", r.redraws},
          {"loading_floors", r.loading_floors},
          {"points", pts}};
}

}  // namespace sdsm
