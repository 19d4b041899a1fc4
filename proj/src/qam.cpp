// SPDX-License-Identifier: Apache-2.0

#include "sdsm/qam.hpp"

#include <algorithm>
#include <cmath>

#include "sdsm/errors.hpp"

namespace sdsm {

namespace {

constexpr unsigned gray(unsigned k) { return k ^ (k >> 1); }

constexpr unsigned gray_inverse(unsigned g) {
  unsigned k = g;
  for (unsigned s = g >> 1; s != 0; s >>= 1) k ^= s;
  return k;
}

double level(unsigned label) { return 2.0 * static_cast<double>(gray_inverse(label & 7u)) - 7.0; }

unsigned slice(double v) {
  const double k = std::round((v / qam64_scale() + 7.0) * 0.5);
  return gray(static_cast<unsigned>(std::clamp(k, 0.0, 7.0)));
}

}  // namespace

double qam64_scale() {
  static const double s = 1.0 / std::sqrt(42.0);
  return s;
}

cplx qam64_mod(std::uint8_t bits) {
  return {level(bits >> 3) * qam64_scale(), level(bits) * qam64_scale()};
}

std::uint8_t qam64_demod(cplx y) {
  if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
    throw DomainError("cannot demodulate a non-finite sample");
  }
  return static_cast<std::uint8_t>((slice(y.real()) << 3) | slice(y.imag()));
}

}  // namespace sdsm
