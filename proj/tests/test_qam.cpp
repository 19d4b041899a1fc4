// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "sdsm/errors.hpp"
#include "sdsm/qam.hpp"

using namespace sdsm;

TEST_CASE("64-QAM constellation") {
  double energy = 0.0;
  std::set<std::pair<double, double>> pts;
  for (int b = 0; b < 64; ++b) {
    const cplx s = qam64_mod(static_cast<std::uint8_t>(b));
    energy += std::norm(s);
    pts.insert({s.real(), s.imag()});
    CHECK(qam64_demod(s) == b);
    CHECK(qam64_demod(s + cplx(0.9, -0.9) * qam64_scale()) == b);
  }
  CHECK(pts.size() == 64);
  CHECK(energy / 64 == doctest::Approx(1.0));
  CHECK(qam64_scale() == doctest::Approx(1.0 / std::sqrt(42.0)));
}

TEST_CASE("Gray labelling: neighbours differ in one bit") {
  const double step = 2.0 * qam64_scale();
  for (int b = 0; b < 64; ++b) {
    const cplx s = qam64_mod(static_cast<std::uint8_t>(b));
    for (cplx d : {cplx(step, 0), cplx(0, step)}) {
      const cplx n = s + d;
      if (std::abs(n.real()) > 7.5 * qam64_scale() || std::abs(n.imag()) > 7.5 * qam64_scale()) continue;
      const int nb = qam64_demod(n);
      CHECK(__builtin_popcount(static_cast<unsigned>(b ^ nb)) == 1);
    }
  }
}

TEST_CASE("demodulation clips far points and rejects NaN") {
  CHECK(qam64_demod(cplx(100, 100)) == qam64_demod(qam64_mod(qam64_demod(cplx(1, 1)))));
  CHECK_THROWS_AS(qam64_demod(cplx(std::numeric_limits<double>::quiet_NaN(), 0)), DomainError);
  CHECK_THROWS_AS(qam64_demod(cplx(0, std::numeric_limits<double>::infinity())), DomainError);
}
