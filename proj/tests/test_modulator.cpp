// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sdsm/errors.hpp"
#include "sdsm/filter_designs.hpp"
#include "sdsm/iq_norms.hpp"
#include "sdsm/modulator.hpp"

using namespace sdsm;

namespace {

std::vector<cplx> random_inputs(std::mt19937_64& rng, std::size_t n, double a) {
  std::uniform_real_distribution<double> u(-a, a);
  std::vector<cplx> v(n);
  for (auto& x : v) x = {u(rng), u(rng)};
  return v;
}

}  // namespace

TEST_CASE("design construction rules") {
  CHECK_THROWS_AS(FilterDesign::one_d(CVector(0), 1.0, 2), DomainError);
  CHECK_THROWS_AS(FilterDesign::one_d(CVector::Zero(1), 0.0, 2), DomainError);
  CHECK_THROWS_AS(FilterDesign::one_d(CVector::Zero(1), 1.0, 1), DomainError);
  CMatrix g = CMatrix::Zero(2, 2);
  g(0, 0) = 1.0;
  CHECK_THROWS_AS(FilterDesign::two_d(g, 1.0, 4), DomainError);
  const FilterDesign d = first_order(3);
  CHECK(d.order() == 1);
  CHECK_THROWS_AS(d.coeffs_2d(), ShapeError);
  CHECK(d.coeff_iq1() == 1.0);
  CHECK(d.overload_safe());
  CHECK_FALSE(d.with_amplitude(2.5).overload_safe());
}

TEST_CASE("shaping response") {
  const FilterDesign d = first_order(2);
  CHECK(std::abs(shaping_response(d, 0.0)) == 0.0);
  CHECK(std::abs(shaping_response(d, kPi)) == doctest::Approx(2.0));
  const double w = 0.7;
  CHECK(std::norm(shaping_response(d, w)) == doctest::Approx(4 * std::pow(std::sin(w / 2), 2)));
  const FilterDesign d2 = first_order_2d(4);
  CHECK(std::abs(shaping_response_2d(d2, 0.0, 0.0)) < 1e-15);
  // (1 - e^{-jw1})(1 - e^{-jw2})
  const cplx expect = (1.0 - std::polar(1.0, -0.4)) * (1.0 - std::polar(1.0, -1.1));
  CHECK(std::abs(shaping_response_2d(d2, 0.4, 1.1) - expect) < 1e-14);
}

TEST_CASE("1D modulator matches the direct recursion") {
  std::mt19937_64 rng(3);
  const FilterDesign designs[] = {first_order(2), second_order(5), freq_shifted(0.6, 4), band_stop(3, -0.4, 12)};
  for (const auto& d : designs) {
    const auto in = random_inputs(rng, 300, d.amplitude());
    const auto got = modulate_1d(in, d);
    std::vector<cplx> g(d.coeffs().data(), d.coeffs().data() + d.coeffs().size());
    const auto ref = oracle::naive_modulate(in, g, d.m_levels());
    REQUIRE(got.output.size() == 300);
    for (std::size_t n = 0; n < in.size(); ++n) {
      CHECK(got.output[static_cast<Eigen::Index>(n)] == ref.x[n]);
      CHECK(std::abs(got.errors[static_cast<Eigen::Index>(n)] - ref.q[n]) < 1e-12);
    }
    CHECK(got.overload_count == 0);
    CHECK(got.max_error_iq <= 1.0 + 1e-12);
  }
}

TEST_CASE("2D modulator matches the direct recursion") {
  std::mt19937_64 rng(5);
  CMatrix g(3, 2);
  g << cplx(0, 0), cplx(-0.5, 0.2), cplx(-0.3, -0.1), cplx(0.2, 0.1), cplx(0.1, 0), cplx(-0.05, 0.05);
  const FilterDesign d = FilterDesign::two_d(g, 2.0, 5);
  const std::size_t n1 = 7, n2 = 9;
  const auto flat = random_inputs(rng, n1 * n2, d.amplitude());
  CMatrix in(n1, n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) in(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[i * n2 + j];
  }
  const auto got = modulate_2d(in, d);
  std::vector<cplx> gv;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) gv.push_back(g(i, j));
  }
  const auto ref = oracle::naive_modulate_2d(flat, n1, n2, gv, 2, 1, 5);
  CHECK(got.rows == n1);
  CHECK(got.cols == n2);
  for (std::size_t k = 0; k < n1 * n2; ++k) {
    CHECK(got.output[static_cast<Eigen::Index>(k)] == ref.x[k]);
    CHECK(std::abs(got.errors[static_cast<Eigen::Index>(k)] - ref.q[k]) < 1e-12);
  }
}

TEST_CASE("error identity x = xbar + sum g q + q") {
  std::mt19937_64 rng(9);
  const FilterDesign d = band_stop(2, 0.3, 6);
  const auto in = random_inputs(rng, 200, d.amplitude());
  const auto r = modulate_1d(in, d);
  for (std::size_t n = 0; n < in.size(); ++n) {
    cplx fb = 0.0;
    for (std::size_t l = 1; l <= 2 && l <= n; ++l) fb += d.coeffs()[static_cast<Eigen::Index>(l - 1)] * r.errors[static_cast<Eigen::Index>(n - l)];
    CHECK(std::abs(r.output[static_cast<Eigen::Index>(n)] - (in[n] + fb + r.errors[static_cast<Eigen::Index>(n)])) < 1e-12);
  }
}

TEST_CASE("no overload for random safe designs") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> mdist(2, 8), ldist(1, 6);
  std::uniform_real_distribution<double> u(-1.0, 1.0), frac(0.05, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = mdist(rng);
    const int l = ldist(rng);
    CVector g(l);
    for (auto& c : g) c = {u(rng), u(rng)};
    const double budget = (m - 0.05) * frac(rng);
    g *= budget / iq_norm1(g);
    const double a = m - iq_norm1(g);
    const FilterDesign d = FilterDesign::one_d(g, a, m);
    const auto in = random_inputs(rng, 256, a);
    const auto r = modulate_1d(in, d);
    CHECK(r.overload_count == 0);
    CHECK(r.max_error_iq <= 1.0 + 1e-12);
  }
}

TEST_CASE("unsafe designs can overload") {
  CVector g(1);
  g << cplx(-3.0, 0.0);
  const FilterDesign d = FilterDesign::one_d(g, 1.0, 2);
  std::vector<cplx> in(64, cplx(0.9, -0.9));
  CHECK(modulate_1d(in, d).overload_count > 0);
}

TEST_CASE("dimension mismatches are rejected") {
  std::vector<cplx> in(4, 0.0);
  CHECK_THROWS_AS(modulate_1d(in, first_order_2d(4)), ShapeError);
  CHECK_THROWS_AS(modulate_2d(CMatrix::Zero(2, 2), first_order(2)), ShapeError);
}

TEST_CASE("noise power estimate does not depend on the thread count") {
  const FilterDesign d = first_order(2);
  const double w[] = {0.3, 1.0};
  const auto a = measure_noise_power(d, w, 128, 70, 42, 1);
  const auto b = measure_noise_power(d, w, 128, 70, 42, 3);
  for (int i = 0; i < 2; ++i) {
    CHECK(a[i].empirical == b[i].empirical);
    CHECK(a[i].predicted == doctest::Approx(2.0 * 128 / 3 * 4 * std::pow(std::sin(w[i] / 2), 2)));
    CHECK(a[i].overload_events == 0);
  }
  CHECK(measure_noise_power(d, 0.3, 128, 70, 42).empirical == a[0].empirical);
}
