// SPDX-License-Identifier: Apache-2.0
//
// Dense primal-dual interior-point solver for
//
//   minimize    c^T x
//   subject to  G x + s = h,   s in K = R_+^l x Q^{q_1} x ... x Q^{q_p}
//
// where Q^q = {(s0, s1) in R x R^{q-1} : s0 >= ||s1||}. Nesterov-Todd scaling,
// Mehrotra predictor-corrector, normal equations G^T W^{-2} G solved densely.
// Intended for the small design problems in this library (a few hundred
// variables at most, thousands of cone rows), not for general use.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "sdsm/types.hpp"

namespace sdsm {

struct ConeProgram {
  RVector c;
  RMatrix g;
  RVector h;
  std::size_t n_linear = 0;             ///< leading rows of G belonging to R_+
  std::vector<std::size_t> soc_dims;    ///< second-order cone block sizes, in row order

  std::size_t n_vars() const { return static_cast<std::size_t>(c.size()); }
  std::size_t n_rows() const { return static_cast<std::size_t>(h.size()); }
  /// Throws ShapeError when the block sizes do not add up.
  void validate() const;
};

struct SolverOptions {
  double tol = 1e-8;           ///< residual and gap tolerance
  std::size_t max_iterations = 100;
  double step_fraction = 0.99;
};

enum class SolveStatus { Optimal, MaxIterations, Stalled };

std::string_view status_name(SolveStatus s);

struct SolverResult {
  RVector x, s, z;
  SolveStatus status = SolveStatus::MaxIterations;
  std::size_t iterations = 0;
  double primal_cost = 0.0;
  double dual_cost = 0.0;
  double primal_residual = 0.0;  ///< ||G x + s - h|| / max(1, ||h||)
  double dual_residual = 0.0;    ///< ||G^T z + c|| / max(1, ||c||)
  double gap = 0.0;              ///< s^T z
  double relative_gap = 0.0;
};

SolverResult solve_cone_program(const ConeProgram& p, const SolverOptions& opts = {});

}  // namespace sdsm
