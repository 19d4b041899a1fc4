// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "sdsm/errors.hpp"
#include "sdsm/socp.hpp"

using namespace sdsm;

TEST_CASE("LP over the nonnegative orthant") {
  // min -x1 - x2  s.t. x1 + 2 x2 <= 4, 3 x1 + x2 <= 6, x >= 0. Optimum (8/5, 6/5).
  ConeProgram p;
  p.c = RVector(2);
  p.c << -1, -1;
  p.g = RMatrix(4, 2);
  p.g << 1, 2, 3, 1, -1, 0, 0, -1;
  p.h = RVector(4);
  p.h << 4, 6, 0, 0;
  p.n_linear = 4;
  const SolverResult r = solve_cone_program(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.6).epsilon(1e-7));
  CHECK(r.x[1] == doctest::Approx(1.2).epsilon(1e-7));
  CHECK(r.primal_cost == doctest::Approx(-2.8).epsilon(1e-8));
  CHECK(r.primal_residual <= 1e-8);
}

TEST_CASE("distance to a point via a second-order cone") {
  // min t s.t. ||x - (3, 4)|| <= t, x1 + x2 <= 1. Optimum t = 6/sqrt(2).
  ConeProgram p;
  p.c = RVector::Zero(3);
  p.c[2] = 1.0;
  p.g = RMatrix::Zero(4, 3);
  p.h = RVector::Zero(4);
  p.g(0, 0) = 1;
  p.g(0, 1) = 1;
  p.h[0] = 1;
  p.n_linear = 1;
  p.soc_dims = {3};
  p.g(1, 2) = -1;
  p.g(2, 0) = -1;
  p.h[2] = -3;
  p.g(3, 1) = -1;
  p.h[3] = -4;
  const SolverResult r = solve_cone_program(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[2] == doctest::Approx(6.0 / std::sqrt(2.0)).epsilon(1e-7));
  CHECK(r.x[0] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.relative_gap <= 1e-8);
}

TEST_CASE("iteration cap returns the best iterate with a status") {
  ConeProgram p;
  p.c = RVector(2);
  p.c << -1, -1;
  p.g = RMatrix(4, 2);
  p.g << 1, 2, 3, 1, -1, 0, 0, -1;
  p.h = RVector(4);
  p.h << 4, 6, 0, 0;
  p.n_linear = 4;
  SolverOptions o;
  o.max_iterations = 2;
  const SolverResult r = solve_cone_program(p, o);
  CHECK(r.status == SolveStatus::MaxIterations);
  CHECK(r.x.size() == 2);
  CHECK(status_name(r.status) == "max-iterations");
}

TEST_CASE("malformed programs are rejected") {
  ConeProgram p;
  p.c = RVector::Zero(2);
  p.g = RMatrix::Zero(3, 2);
  p.h = RVector::Zero(3);
  p.n_linear = 1;
  p.soc_dims = {3};
  CHECK_THROWS_AS(p.validate(), ShapeError);
  p.soc_dims = {1, 1};
  CHECK_THROWS_AS(p.validate(), ShapeError);
  p.soc_dims = {2};
  p.g = RMatrix::Zero(3, 3);
  CHECK_THROWS_AS(p.validate(), ShapeError);
  SolverOptions o;
  o.tol = 0.0;
  p.g = RMatrix::Identity(3, 2);
  CHECK_THROWS_AS(solve_cone_program(p, o), DomainError);
}
