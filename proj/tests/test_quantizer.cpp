// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sdsm/errors.hpp"
#include "sdsm/iq_norms.hpp"
#include "sdsm/quantizer.hpp"

using namespace sdsm;

TEST_CASE("alphabets") {
  CHECK(SignalSet(2).levels() == std::vector<double>{-1, 1});
  CHECK(SignalSet(3).levels() == std::vector<double>{-2, 0, 2});
  CHECK(SignalSet(5).levels() == std::vector<double>{-4, -2, 0, 2, 4});
  CHECK(SignalSet(4).max_level() == 3.0);
  CHECK_THROWS_AS(SignalSet(1), DomainError);
}

TEST_CASE("rounding, ties and saturation") {
  const SignalSet two(2), three(3), four(4);
  CHECK(two.quantize(0.0) == 1.0);  // tie goes up
  CHECK(two.quantize(-1e-300) == -1.0);
  CHECK(two.quantize(17.0) == 1.0);
  CHECK(two.quantize(-17.0) == -1.0);
  CHECK(three.quantize(1.0) == 2.0);
  CHECK(three.quantize(-1.0) == 0.0);
  CHECK(three.quantize(0.99) == 0.0);
  CHECK(three.quantize(-3.5) == -2.0);
  CHECK(four.quantize(2.0) == 3.0);
  CHECK(four.quantize(-2.0) == -1.0);
  CHECK(four.quantize(cplx(0.2, -5.0)) == cplx(1.0, -3.0));
  CHECK_THROWS_AS(two.quantize(std::nan("")), DomainError);
  CHECK_THROWS_AS(two.quantize(INFINITY), DomainError);
}

TEST_CASE("quantizer matches exhaustive nearest-level search") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  for (int m = 2; m <= 9; ++m) {
    for (int i = 0; i < 2000; ++i) {
      const double y = u(rng);
      CHECK(quantize_level(y, m) == oracle::nearest_level(y, m));
    }
    // Exact half-way points between levels.
    for (int k = -m; k <= m; ++k) {
      const double y = static_cast<double>(k);
      CHECK(quantize_level(y, m) == oracle::nearest_level(y, m));
    }
  }
}

TEST_CASE("IQ norms") {
  CVector v(3);
  v << cplx(1, -2), cplx(-0.5, 0.25), cplx(0, 3);
  CHECK(iq_norm1(v) == doctest::Approx(6.75));
  CHECK(iq_norm_inf(v) == 3.0);
  CHECK(iq_norm_inf(cplx(-4, 2)) == 4.0);
}
