// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sdsm/conic_design.hpp"
#include "sdsm/errors.hpp"
#include "sdsm/filter_designs.hpp"

using namespace sdsm;

namespace {

std::vector<cplx> as_vector(const CVector& v) { return {v.data(), v.data() + v.size()}; }

double worst_sector_rnsr_db(const FilterDesign& d, double spacing) {
  double w = 0.0;
  for (int i = 0; i <= 600; ++i) w = std::max(w, rnsr(d, deg2rad(-30.0 + 0.1 * i), spacing));
  return 10 * std::log10(w);
}

}  // namespace

TEST_CASE("analytic single-target optimum") {
  const std::vector<double> w{0.0}, g{1.0};
  const ConicProblem p = build_user_targeted(w, g, 1, 3);
  const ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(std::abs(s.objective - std::sqrt(0.2)) < 1e-6);
  CHECK(std::abs(s.nu[0] - cplx(-0.2, 0.0)) < 1e-6);
  CHECK(std::abs(s.xi - 0.4) < 1e-6);
  const FilterDesign d = recover(s);
  CHECK(std::abs(d.coeffs()[0] - cplx(-0.5, 0.0)) < 1e-6);
  CHECK(std::abs(d.amplitude() - 2.5) < 1e-6);
  CHECK(d.amplitude() + d.coeff_iq1() <= 3.0 + 1e-6);
}

TEST_CASE("exact notch when there is no background noise") {
  for (double w0 : {0.0, 0.7, -2.1}) {
    const std::vector<double> w{w0}, g{0.0};
    const ConicSolution s = solve(build_user_targeted(w, g, 1, 3));
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective <= 1e-7);
    CHECK(std::abs(s.nu[0] + std::polar(1.0, w0) * s.xi) < 1e-6);
  }
  // Collapsed sector, one sample.
  const ConicSolution s = solve(build_fixed_sector(0.4, 0.4, 5, 0.0, 1, 3));
  CHECK(s.objective <= 1e-7);
  const FilterDesign d = recover(s);
  CHECK(std::abs(d.coeffs()[0] + std::polar(1.0, 0.4)) < 1e-5);
}

TEST_CASE("problem structure and feasibility witness") {
  const std::vector<double> w{0.1, -0.5}, g{0.3, 0.0};
  const ConicProblem p = build_user_targeted(w, g, 3, 4);
  CHECK(p.n_coeffs() == 3);
  CHECK(p.program().soc_dims == std::vector<std::size_t>{4, 3});
  CHECK(p.program().n_linear == 4 * 3 + 2);
  const std::vector<cplx> zero(3, 0.0);
  CHECK(p.feasible(zero, 0.25));
  CHECK_FALSE(p.feasible(zero, 0.2));
  CHECK(p.objective_at(zero, 0.25) == doctest::Approx(0.25 * std::sqrt(1.3)));
  CHECK_THROWS_AS(build_user_targeted(w, std::vector<double>{0.1}, 3, 4), DomainError);
  CHECK_THROWS_AS(build_user_targeted(w, g, 3, 1), DomainError);
  CHECK_THROWS_AS(build_user_targeted(w, std::vector<double>{-0.1, 0.0}, 3, 4), DomainError);
  CHECK_THROWS_AS(build_fixed_sector(0.5, 0.4, 8, 0.0, 2, 4), DomainError);
  const UpaGeometry upa{8, 8, 0.25, 0.25};
  CHECK_THROWS_AS(build_2d_fixed_sector({-0.1, 0.1}, {0.0, 0.1}, upa, 0, 3, 0.0, 1, 1, 4), DomainError);
}

TEST_CASE("solver objective matches brute force on small problems") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> w(-3.0, 3.0), g(0.1, 2.0);
  std::uniform_int_distribution<int> L(1, 2), M(2, 6);
  for (int i = 0; i < 3; ++i) {
    oracle::GridProblem p;
    p.order = static_cast<std::size_t>(L(rng));
    p.m = M(rng);
    p.omegas = {w(rng)};
    p.gammas = {g(rng)};
    const double ref = oracle::grid_search(p);
    const ConicSolution s = solve(build_user_targeted(p.omegas, p.gammas, p.order, p.m));
    CHECK(std::abs(s.objective - ref) <= 1e-3 * ref);
    // The solver's point evaluates to its own objective.
    CHECK(oracle::inner_objective(p, as_vector(s.nu), s.xi) == doctest::Approx(s.objective).epsilon(1e-6));
  }
}

TEST_CASE("objective is monotone in gamma") {
  const std::vector<double> w{0.3, 1.2};
  double last = 0.0;
  for (double scale : {0.1, 0.5, 1.0, 2.0, 8.0}) {
    const std::vector<double> g{0.2 * scale, 0.5 * scale};
    const ConicSolution s = solve(build_user_targeted(w, g, 2, 4));
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective >= last - 1e-9);
    last = s.objective;
  }
}

TEST_CASE("restricting nu to zero gives the unshaped value") {
  // With nu = 0 the best xi is 1/M, objective sqrt(1 + gamma)/M.
  const std::vector<double> w{0.3}, g{0.5};
  const ConicProblem p = build_user_targeted(w, g, 2, 4);
  const std::vector<cplx> zero(2, 0.0);
  CHECK(p.objective_at(zero, 0.25) == doctest::Approx(std::sqrt(1.5) / 4));
  CHECK(solve(p).objective <= std::sqrt(1.5) / 4 + 1e-9);
}

TEST_CASE("single-sample sector equals the single-user problem") {
  const std::vector<double> w{0.6}, g{0.4};
  const double a = solve(build_user_targeted(w, g, 3, 5)).objective;
  const double b = solve(build_fixed_sector(0.6, 0.6, 1, 0.4, 3, 5)).objective;
  CHECK(a == doctest::Approx(b).epsilon(1e-7));
}

TEST_CASE("recover checks its preconditions") {
  ConicSolution s;
  s.nu = CVector::Zero(1);
  s.xi = 0.0;
  s.order_1 = 1;
  s.m_levels = 3;
  CHECK_THROWS_AS(recover(s), NumericalError);
  s.xi = 1.0;
  s.nu[0] = -1.0;
  const FilterDesign d = recover(s, 1e-6);
  CHECK(d.amplitude() == 1.0);
  CHECK(d.coeffs()[0] == cplx(-1.0, 0.0));
  s.nu[0] = -3.0;
  CHECK_THROWS_AS(recover(s), NumericalError);
}

TEST_CASE("fixed-sector design beats the closed forms in the sector") {
  for (int m : {4, 5}) {
    DesignSpec spec;
    spec.mode = DesignMode::FixedSector;
    spec.m_levels = m;
    spec.ula = {1024, 0.25};
    spec.ctx = {1.0, 0.0, 1024};
    const DesignReport r = design(spec);
    CHECK(r.design.overload_safe(1e-12));
    const double fs = worst_sector_rnsr_db(r.design, 0.25);
    CHECK(fs < worst_sector_rnsr_db(first_order(m), 0.25));
    CHECK(fs < worst_sector_rnsr_db(second_order(m), 0.25));
  }
}

TEST_CASE("user-targeted design notches users and beats first order") {
  DesignSpec spec;
  spec.mode = DesignMode::UserTargeted;
  spec.m_levels = 5;
  spec.ula = {1024, 0.25};
  spec.ctx = {1.0, 0.0, 1024};
  for (double deg : {-50.0, -31.0, -12.0, 8.0, 27.0, 45.0}) spec.users.push_back({cplx(1.0, 0.0), deg2rad(deg), 0.0});
  const DesignReport r = design(spec);
  CHECK(r.design.overload_safe(1e-12));
  CHECK(r.worst_target_rnsr < 1e-10);
  Sqnr first_min = Sqnr::unbounded();
  for (const auto& u : spec.users) {
    first_min = std::min(first_min, sqnr(first_order(5), spec.ctx, u.gain, spatial_frequency(u.azimuth, 0.25)));
  }
  CHECK(r.min_sqnr > first_min);
}

TEST_CASE("2D designs") {
  // Point target at the origin: exact notch.
  const std::vector<std::pair<double, double>> origin{{0.0, 0.0}};
  const ConicSolution s = solve(build_2d_user_targeted(origin, std::vector<double>{0.0}, 1, 1, 4));
  CHECK(s.objective <= 1e-7);
  // Targets on the w2 = 0 line: no worse than the 1D problem in w1.
  const std::vector<std::pair<double, double>> line{{0.3, 0.0}, {-0.7, 0.0}};
  const std::vector<double> g{0.3, 0.6};
  const double t2 = solve(build_2d_user_targeted(line, g, 1, 1, 4)).objective;
  const double t1 = solve(build_user_targeted(std::vector<double>{0.3, -0.7}, g, 1, 4)).objective;
  CHECK(t2 <= t1 + 1e-7);
  const FilterDesign d = recover(solve(build_2d_user_targeted(line, g, 1, 1, 4)));
  CHECK(d.is_2d());
  CHECK(d.coeffs_2d()(0, 0) == cplx(0.0, 0.0));
  CHECK(d.order_1() == 1);
  CHECK(d.order_2() == 1);
}

TEST_CASE("design spec validation") {
  DesignSpec spec;
  spec.mode = DesignMode::UserTargeted;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.mode = DesignMode::FixedSector;
  spec.r_min = 2.0;
  spec.r_max = 1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.r_max = 2.0;
  spec.m_levels = 1;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
