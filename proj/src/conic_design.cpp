// SPDX-License-Identifier: Apache-2.0

#include "sdsm/conic_design.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sdsm/errors.hpp"
#include "sdsm/iq_norms.hpp"

namespace sdsm {

namespace {

void check_targets(const std::vector<DesignTarget>& targets) {
  if (targets.empty()) throw DomainError("design needs at least one target");
  for (const auto& t : targets) {
    if (!std::isfinite(t.omega1) || !std::isfinite(t.omega2)) {
      throw DomainError("target frequencies must be finite");
    }
    if (!(t.gamma >= 0.0)) throw DomainError("gamma must be non-negative");
    if (!(t.weight > 0.0)) throw DomainError("target weight must be positive");
  }
}

double phase_of(std::pair<std::size_t, std::size_t> lag, const DesignTarget& t) {
  return static_cast<double>(lag.first) * t.omega1 + static_cast<double>(lag.second) * t.omega2;
}

}  // namespace

ConicProblem ConicProblem::one_d(std::size_t order, int m_levels, std::vector<DesignTarget> targets) {
  if (m_levels < 2) throw DomainError("design needs M >= 2");
  if (order == 0) throw DomainError("design needs order L >= 1");
  check_targets(targets);
  ConicProblem p;
  p.two_d_ = false;
  p.order_1_ = order;
  p.m_levels_ = m_levels;
  p.targets_ = std::move(targets);
  for (std::size_t l = 1; l <= order; ++l) p.lags_.emplace_back(l, 0);
  p.assemble();
  return p;
}

ConicProblem ConicProblem::two_d(std::size_t order_1, std::size_t order_2, int m_levels,
                                 std::vector<DesignTarget> targets) {
  if (m_levels < 2) throw DomainError("design needs M >= 2");
  if (order_1 + order_2 == 0) throw DomainError("2D design needs at least one free coefficient");
  check_targets(targets);
  ConicProblem p;
  p.two_d_ = true;
  p.order_1_ = order_1;
  p.order_2_ = order_2;
  p.m_levels_ = m_levels;
  p.targets_ = std::move(targets);
  for (std::size_t i = 0; i <= order_1; ++i) {
    for (std::size_t j = 0; j <= order_2; ++j) {
      if (i != 0 || j != 0) p.lags_.emplace_back(i, j);
    }
  }
  p.assemble();
  return p;
}

void ConicProblem::assemble() {
  const std::size_t pc = n_coeffs();
  const std::size_t n = 4 * pc + 2;
  const std::size_t n_linear = 4 * pc + 2;
  std::size_t soc_rows = 0;
  program_.soc_dims.clear();
  for (const auto& t : targets_) {
    const std::size_t q = t.gamma > 0.0 ? 4 : 3;
    program_.soc_dims.push_back(q);
    soc_rows += q;
  }
  const auto rows = static_cast<Eigen::Index>(n_linear + soc_rows);
  program_.n_linear = n_linear;
  program_.c = RVector::Zero(static_cast<Eigen::Index>(n));
  program_.c[static_cast<Eigen::Index>(t_index())] = 1.0;
  program_.g = RMatrix::Zero(rows, static_cast<Eigen::Index>(n));
  program_.h = RVector::Zero(rows);
  auto& g = program_.g;
  auto idx = [](std::size_t v) { return static_cast<Eigen::Index>(v); };

  // |Re nu_k| <= u_k, |Im nu_k| <= u_{P+k}
  for (std::size_t k = 0; k < pc; ++k) {
    g(idx(k), idx(re_index(k))) = 1.0;
    g(idx(k), idx(slack_index(k))) = -1.0;
    g(idx(pc + k), idx(re_index(k))) = -1.0;
    g(idx(pc + k), idx(slack_index(k))) = -1.0;
    g(idx(2 * pc + k), idx(im_index(k))) = 1.0;
    g(idx(2 * pc + k), idx(slack_index(pc + k))) = -1.0;
    g(idx(3 * pc + k), idx(im_index(k))) = -1.0;
    g(idx(3 * pc + k), idx(slack_index(pc + k))) = -1.0;
  }
  // 1 + sum u <= M xi
  const auto budget = idx(4 * pc);
  for (std::size_t j = 0; j < 2 * pc; ++j) g(budget, idx(slack_index(j))) = 1.0;
  g(budget, idx(xi_index())) = -static_cast<double>(m_levels_);
  program_.h[budget] = -1.0;
  // xi >= 0
  g(budget + 1, idx(xi_index())) = -1.0;

  // Cones: s = (t, w Re(xi + a^T nu), w Im(xi + a^T nu)[, sqrt(gamma) xi]).
  Eigen::Index row = idx(n_linear);
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const DesignTarget& t = targets_[i];
    g(row, idx(t_index())) = -1.0;
    g(row + 1, idx(xi_index())) = -t.weight;
    for (std::size_t k = 0; k < pc; ++k) {
      const double ph = phase_of(lags_[k], t);
      const double c = std::cos(ph);
      const double s = std::sin(ph);
      // e^{-j ph} (a + j b) = (a c + b s) + j (b c - a s)
      g(row + 1, idx(re_index(k))) = -t.weight * c;
      g(row + 1, idx(im_index(k))) = -t.weight * s;
      g(row + 2, idx(re_index(k))) = t.weight * s;
      g(row + 2, idx(im_index(k))) = -t.weight * c;
    }
    if (program_.soc_dims[i] == 4) g(row + 3, idx(xi_index())) = -std::sqrt(t.gamma);
    row += static_cast<Eigen::Index>(program_.soc_dims[i]);
  }
}

double ConicProblem::objective_at(std::span<const cplx> nu, double xi) const {
  if (nu.size() != n_coeffs()) throw ShapeError("nu has the wrong number of coefficients");
  double worst = 0.0;
  for (const auto& t : targets_) {
    cplx acc(xi, 0.0);
    for (std::size_t k = 0; k < nu.size(); ++k) acc += std::polar(1.0, -phase_of(lags_[k], t)) * nu[k];
    worst = std::max(worst, std::sqrt(t.weight * t.weight * std::norm(acc) + t.gamma * xi * xi));
  }
  return worst;
}

bool ConicProblem::feasible(std::span<const cplx> nu, double xi, double tol) const {
  double l1 = 0.0;
  for (const cplx& v : nu) l1 += std::abs(v.real()) + std::abs(v.imag());
  return xi >= -tol && 1.0 + l1 <= static_cast<double>(m_levels_) * xi + tol;
}

ConicProblem build_user_targeted(std::span<const double> omegas, std::span<const double> gammas,
                                 std::size_t order, int m_levels) {
  if (omegas.size() != gammas.size()) throw DomainError("omegas and gammas differ in length");
  std::vector<DesignTarget> t;
  for (std::size_t i = 0; i < omegas.size(); ++i) t.push_back({omegas[i], 0.0, gammas[i], 1.0});
  return ConicProblem::one_d(order, m_levels, std::move(t));
}

ConicProblem build_fixed_sector(double omega_l, double omega_u, std::size_t samples,
                                double gamma_sector, std::size_t order, int m_levels,
                                double weight) {
  if (!(omega_l <= omega_u)) throw DomainError("sector needs omega_l <= omega_u");
  if (samples == 0) throw DomainError("sector discretization needs at least one sample");
  std::vector<DesignTarget> t;
  for (std::size_t i = 0; i < samples; ++i) {
    const double w = samples == 1 ? 0.5 * (omega_l + omega_u)
                                  : omega_l + (omega_u - omega_l) * static_cast<double>(i) /
                                                  static_cast<double>(samples - 1);
    t.push_back({w, 0.0, gamma_sector, weight});
  }
  // A collapsed sector yields identical samples; one copy carries the same constraint.
  t.erase(std::unique(t.begin(), t.end(),
                      [](const DesignTarget& a, const DesignTarget& b) { return a.omega1 == b.omega1; }),
          t.end());
  return ConicProblem::one_d(order, m_levels, std::move(t));
}

ConicProblem build_2d_user_targeted(std::span<const std::pair<double, double>> omegas,
                                    std::span<const double> gammas, std::size_t order_1,
                                    std::size_t order_2, int m_levels) {
  if (omegas.size() != gammas.size()) throw DomainError("omegas and gammas differ in length");
  std::vector<DesignTarget> t;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    t.push_back({omegas[i].first, omegas[i].second, gammas[i], 1.0});
  }
  return ConicProblem::two_d(order_1, order_2, m_levels, std::move(t));
}

ConicProblem build_2d_fixed_sector(std::pair<double, double> theta_range,
                                   std::pair<double, double> phi_range, const UpaGeometry& g,
                                   std::size_t grid_theta, std::size_t grid_phi,
                                   double gamma_sector, std::size_t order_1, std::size_t order_2,
                                   int m_levels, double weight) {
  if (grid_theta == 0 || grid_phi == 0) throw DomainError("2D sector grid is empty");
  if (!(theta_range.first <= theta_range.second) || !(phi_range.first <= phi_range.second)) {
    throw DomainError("sector bounds must be ordered");
  }
  auto sample = [](std::pair<double, double> r, std::size_t n, std::size_t i) {
    if (n == 1) return 0.5 * (r.first + r.second);
    return r.first + (r.second - r.first) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::map<std::pair<double, double>, bool> seen;
  std::vector<DesignTarget> t;
  for (std::size_t a = 0; a < grid_theta; ++a) {
    for (std::size_t b = 0; b < grid_phi; ++b) {
      const auto w = spatial_frequency_2d(sample(theta_range, grid_theta, a),
                                          sample(phi_range, grid_phi, b), g);
      if (seen.emplace(w, true).second) t.push_back({w.first, w.second, gamma_sector, weight});
    }
  }
  return ConicProblem::two_d(order_1, order_2, m_levels, std::move(t));
}

ConicSolution solve(const ConicProblem& p, double tol) {
  if (!(tol > 0.0)) throw DomainError("solver tolerance must be positive");
  SolverOptions opts;
  opts.tol = tol;
  const SolverResult r = solve_cone_program(p.program(), opts);
  ConicSolution sol;
  sol.nu.resize(static_cast<Eigen::Index>(p.n_coeffs()));
  for (std::size_t k = 0; k < p.n_coeffs(); ++k) {
    sol.nu[static_cast<Eigen::Index>(k)] = {r.x[static_cast<Eigen::Index>(p.re_index(k))],
                                            r.x[static_cast<Eigen::Index>(p.im_index(k))]};
  }
  sol.xi = r.x[static_cast<Eigen::Index>(p.xi_index())];
  sol.objective = r.x[static_cast<Eigen::Index>(p.t_index())];
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.primal_residual = r.primal_residual;
  sol.dual_residual = r.dual_residual;
  sol.gap = r.gap;
  sol.relative_gap = r.relative_gap;
  sol.two_d = p.is_2d();
  sol.order_1 = p.order_1();
  sol.order_2 = p.order_2();
  for (std::size_t k = 0; k < p.n_coeffs(); ++k) sol.lags.push_back(p.lag(k));
  sol.m_levels = p.m_levels();
  return sol;
}

FilterDesign recover(const ConicSolution& sol, double tol) {
  if (!(sol.xi > 0.0)) throw NumericalError("recover needs xi > 0, got " + std::to_string(sol.xi));
  const double amplitude = 1.0 / sol.xi;
  FilterDesign d = [&] {
    if (!sol.two_d) {
      CVector g = sol.nu / sol.xi;
      return FilterDesign::one_d(std::move(g), amplitude, sol.m_levels);
    }
    CMatrix g = CMatrix::Zero(static_cast<Eigen::Index>(sol.order_1 + 1),
                              static_cast<Eigen::Index>(sol.order_2 + 1));
    for (std::size_t k = 0; k < sol.lags.size(); ++k) {
      g(static_cast<Eigen::Index>(sol.lags[k].first), static_cast<Eigen::Index>(sol.lags[k].second)) =
          sol.nu[static_cast<Eigen::Index>(k)] / sol.xi;
    }
    return FilterDesign::two_d(std::move(g), amplitude, sol.m_levels);
  }();
  const double excess = d.amplitude() + d.coeff_iq1() - static_cast<double>(d.m_levels());
  if (excess > tol) {
    throw NumericalError("recovered design violates A + ||g||_IQ-1 <= M by " + std::to_string(excess));
  }
  return d;
}

// -------------------------------------------------------------------- design

void DesignSpec::validate() const {
  if (m_levels < 2) throw ConfigError("M must be >= 2");
  if (order_1 + order_2 == 0 || (!two_d && order_1 == 0)) throw ConfigError("filter order must be >= 1");
  ctx.validate();
  if (two_d) {
    upa.validate();
  } else {
    ula.validate();
  }
  if (mode == DesignMode::UserTargeted) {
    if (users.empty()) throw ConfigError("user-targeted design needs at least one user");
    for (const auto& u : users) u.validate();
  } else {
    if (!(r_min > 0.0 && r_min <= r_max)) throw ConfigError("need 0 < r_min <= r_max");
    if (!(theta_range.first <= theta_range.second)) throw ConfigError("theta sector bounds reversed");
    if (two_d && !(phi_range.first <= phi_range.second)) throw ConfigError("phi sector bounds reversed");
  }
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
}

ConicProblem build_problem(const DesignSpec& spec) {
  spec.validate();
  if (spec.mode == DesignMode::UserTargeted) {
    std::vector<double> gammas;
    for (const auto& u : spec.users) gammas.push_back(spec.ctx.gamma(std::abs(u.gain)));
    if (!spec.two_d) {
      std::vector<double> omegas;
      for (const auto& u : spec.users) omegas.push_back(spatial_frequency(u.azimuth, spec.ula.spacing_ratio));
      return build_user_targeted(omegas, gammas, spec.order_1, spec.m_levels);
    }
    std::vector<std::pair<double, double>> omegas;
    for (const auto& u : spec.users) omegas.push_back(spatial_frequency_2d(u.azimuth, u.elevation, spec.upa));
    return build_2d_user_targeted(omegas, gammas, spec.order_1, spec.order_2, spec.m_levels);
  }
  const double gamma = spec.ctx.gamma(spec.r_min);
  const double weight = spec.r_max / spec.r_min;
  if (!spec.two_d) {
    const std::size_t samples = spec.samples != 0 ? spec.samples : std::max<std::size_t>(64, 8 * spec.order_1);
    return build_fixed_sector(spatial_frequency(spec.theta_range.first, spec.ula.spacing_ratio),
                              spatial_frequency(spec.theta_range.second, spec.ula.spacing_ratio),
                              samples, gamma, spec.order_1, spec.m_levels, weight);
  }
  return build_2d_fixed_sector(spec.theta_range, spec.phi_range, spec.upa, spec.grid_theta,
                               spec.grid_phi, gamma, spec.order_1, spec.order_2, spec.m_levels,
                               weight);
}

DesignReport design(const DesignSpec& spec) {
  const ConicProblem problem = build_problem(spec);
  ConicSolution sol = solve(problem, spec.tol);
  if (sol.status != SolveStatus::Optimal) {
    throw NumericalError(std::string("design solver ended with status ") +
                         std::string(status_name(sol.status)) + " after " +
                         std::to_string(sol.iterations) + " iterations (primal residual " +
                         std::to_string(sol.primal_residual) + ", gap " + std::to_string(sol.gap) + ")");
  }
  FilterDesign d = recover(sol);
  // Solver tolerance can leave A + ||g|| a hair above M; pull A back so the
  // no-overload condition holds exactly.
  const double room = static_cast<double>(d.m_levels()) - d.coeff_iq1();
  if (d.amplitude() > room) d = d.with_amplitude(room);

  DesignReport rep{d, sol, Sqnr::unbounded(), {}, 0.0};
  auto response_sq = [&](const DesignTarget& t) {
    return d.is_2d() ? std::norm(shaping_response_2d(d, t.omega1, t.omega2))
                     : std::norm(shaping_response(d, t.omega1));
  };
  const double a2 = d.amplitude() * d.amplitude();
  if (spec.mode == DesignMode::UserTargeted) {
    for (std::size_t i = 0; i < spec.users.size(); ++i) {
      const DesignTarget& t = problem.targets()[i];
      const Sqnr s = sqnr_from_response(d.amplitude(), response_sq(t), spec.ctx, std::abs(spec.users[i].gain));
      rep.target_sqnr_db.push_back(s.db());
      rep.min_sqnr = std::min(rep.min_sqnr, s);
      rep.worst_target_rnsr = std::max(rep.worst_target_rnsr, response_sq(t) / a2);
    }
  } else {
    // Worst-case lower bound rho r_min^2 A^2 / ((2 N rho r_max^2 / 3)|1+G|^2 + sigma^2).
    const double ratio = spec.r_max / spec.r_min;
    for (const auto& t : problem.targets()) {
      const Sqnr s = sqnr_from_response(d.amplitude(), response_sq(t) * ratio * ratio, spec.ctx, spec.r_min);
      rep.min_sqnr = std::min(rep.min_sqnr, s);
      rep.worst_target_rnsr = std::max(rep.worst_target_rnsr, response_sq(t) / a2);
    }
  }
  return rep;
}

}  // namespace sdsm
