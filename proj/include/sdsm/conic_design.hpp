// SPDX-License-Identifier: Apache-2.0
//
// Max-min SQNR noise-shaping design as a second-order cone program.
//
// With nu = g / A and xi = 1 / A the design
//
//   minimize_{g, A}  max_i sqrt(w_i^2 |1 + G(omega_i)|^2 + gamma_i) / A
//   subject to       A + ||g||_IQ-1 <= M
//
// becomes the convex problem
//
//   minimize   t
//   subject to ||(w_i Re(xi + a_i^T nu), w_i Im(xi + a_i^T nu), sqrt(gamma_i) xi)|| <= t
//              1 + sum(u) <= M xi,  -u <= Re nu, Im nu <= u,  xi >= 0
//
// where a_i holds the phasors e^{-j phase_k(omega_i)} of the free coefficients.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sdsm/array_model.hpp"
#include "sdsm/filter_designs.hpp"
#include "sdsm/modulator.hpp"
#include "sdsm/socp.hpp"

namespace sdsm {

/// One row of the max-min objective: a frequency point with its noise weight.
struct DesignTarget {
  double omega1 = 0.0;
  double omega2 = 0.0;  ///< unused for 1D problems
  double gamma = 0.0;   ///< background-noise term, 3 sigma^2 / (2 N rho |alpha|^2)
  double weight = 1.0;  ///< multiplies |1 + G|; r_max / r_min for fixed-sector problems
};

/// Layout of the real decision vector:
///   [Re nu (P) | Im nu (P) | xi | t | u (2P)],  P = number of free coefficients.
class ConicProblem {
 public:
  static ConicProblem one_d(std::size_t order, int m_levels, std::vector<DesignTarget> targets);
  static ConicProblem two_d(std::size_t order_1, std::size_t order_2, int m_levels,
                            std::vector<DesignTarget> targets);

  bool is_2d() const { return two_d_; }
  std::size_t order_1() const { return order_1_; }  ///< L for 1D
  std::size_t order_2() const { return order_2_; }  ///< 0 for 1D
  int m_levels() const { return m_levels_; }
  const std::vector<DesignTarget>& targets() const { return targets_; }
  const ConeProgram& program() const { return program_; }

  std::size_t n_coeffs() const { return lags_.size(); }
  /// (l1, l2) lag of free coefficient k; 1D uses (l, 0) with l = k + 1.
  std::pair<std::size_t, std::size_t> lag(std::size_t k) const { return lags_[k]; }

  std::size_t re_index(std::size_t k) const { return k; }
  std::size_t im_index(std::size_t k) const { return n_coeffs() + k; }
  std::size_t xi_index() const { return 2 * n_coeffs(); }
  std::size_t t_index() const { return 2 * n_coeffs() + 1; }
  std::size_t slack_index(std::size_t j) const { return 2 * n_coeffs() + 2 + j; }

  /// Objective max_i sqrt(w_i^2 |xi + a_i^T nu|^2 + gamma_i xi^2) at (nu, xi),
  /// ignoring feasibility.
  double objective_at(std::span<const cplx> nu, double xi) const;
  /// 1 + ||nu||_IQ-1 <= M xi and xi >= 0, within tol.
  bool feasible(std::span<const cplx> nu, double xi, double tol = 1e-12) const;

 private:
  ConicProblem() = default;
  void assemble();

  bool two_d_ = false;
  std::size_t order_1_ = 0;
  std::size_t order_2_ = 0;
  int m_levels_ = 2;
  std::vector<DesignTarget> targets_;
  std::vector<std::pair<std::size_t, std::size_t>> lags_;
  ConeProgram program_;
};

/// Targets at the given frequencies with per-target gamma.
ConicProblem build_user_targeted(std::span<const double> omegas, std::span<const double> gammas,
                                 std::size_t order, int m_levels);

/// `samples` uniform points on [omega_l, omega_u]; each cone carries weight
/// r_max / r_min and gamma_sector = 3 sigma^2 / (2 N rho r_min^2).
ConicProblem build_fixed_sector(double omega_l, double omega_u, std::size_t samples,
                                double gamma_sector, std::size_t order, int m_levels,
                                double weight = 1.0);

ConicProblem build_2d_user_targeted(std::span<const std::pair<double, double>> omegas,
                                    std::span<const double> gammas, std::size_t order_1,
                                    std::size_t order_2, int m_levels);

/// Rectangular (theta, phi) sector sampled on a grid_theta x grid_phi grid,
/// mapped through the UPA frequency map; coincident frequency pairs are merged.
ConicProblem build_2d_fixed_sector(std::pair<double, double> theta_range,
                                   std::pair<double, double> phi_range, const UpaGeometry& g,
                                   std::size_t grid_theta, std::size_t grid_phi,
                                   double gamma_sector, std::size_t order_1, std::size_t order_2,
                                   int m_levels, double weight = 1.0);

struct ConicSolution {
  CVector nu;  ///< free coefficients in ConicProblem order
  double xi = 0.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  bool two_d = false;
  std::size_t order_1 = 0;
  std::size_t order_2 = 0;
  std::vector<std::pair<std::size_t, std::size_t>> lags;
  int m_levels = 2;
};

ConicSolution solve(const ConicProblem& p, double tol = 1e-8);

/// Inverts the change of variables: A = 1/xi, g = nu/xi. Throws NumericalError
/// if xi <= 0 or if A + ||g||_IQ-1 exceeds M by more than `tol`.
FilterDesign recover(const ConicSolution& sol, double tol = 1e-6);

// ---------------------------------------------------------------- design()

enum class DesignMode { UserTargeted, FixedSector };

struct DesignSpec {
  DesignMode mode = DesignMode::FixedSector;
  bool two_d = false;
  std::size_t order_1 = 16;  ///< L (1D) or L1
  std::size_t order_2 = 0;   ///< L2 (2D)
  int m_levels = 4;
  SqnrContext ctx;

  UlaGeometry ula;  ///< 1D; only spacing_ratio and n_antennas matter
  UpaGeometry upa;  ///< 2D

  std::vector<UserChannel> users;  ///< user-targeted mode

  std::pair<double, double> theta_range{-kPi / 6, kPi / 6};  ///< fixed-sector mode, radians
  std::pair<double, double> phi_range{0.0, 0.0};
  double r_min = 1.0;
  double r_max = 1.0;
  std::size_t samples = 0;  ///< 0 selects max(64, 8 L) for 1D
  std::size_t grid_theta = 33;
  std::size_t grid_phi = 33;

  double tol = 1e-8;

  void validate() const;
};

struct DesignReport {
  FilterDesign design;
  ConicSolution solution;
  /// min over users (user-targeted) or over sector samples of the SQNR lower
  /// bound (fixed-sector).
  Sqnr min_sqnr = Sqnr::finite(0.0);
  std::vector<double> target_sqnr_db;
  double worst_target_rnsr = 0.0;  ///< max RNSR over the optimization targets
};

/// build -> solve -> recover. Throws NumericalError if the solver does not
/// reach the requested tolerance.
DesignReport design(const DesignSpec& spec);

/// Problem that design() would solve, exposed for inspection and tests.
ConicProblem build_problem(const DesignSpec& spec);

}  // namespace sdsm
