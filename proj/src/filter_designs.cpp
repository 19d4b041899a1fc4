// SPDX-License-Identifier: Apache-2.0

#include "sdsm/filter_designs.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sdsm/errors.hpp"

namespace sdsm {

double max_safe_amplitude(double coeff_iq1, int m_levels) {
  const double a = static_cast<double>(m_levels) - coeff_iq1;
  if (!(a > 0.0)) {
    throw DomainError("no positive overload-safe amplitude: need M > ||g||_IQ-1 = " +
                      std::to_string(coeff_iq1) + ", got M = " + std::to_string(m_levels));
  }
  return a;
}

namespace {

FilterDesign closed_form(CVector g, int m_levels) {
  const double a = max_safe_amplitude(iq_norm1(g), m_levels);
  return FilterDesign::one_d(std::move(g), a, m_levels);
}

}  // namespace

FilterDesign first_order(int m_levels) {
  CVector g(1);
  g << cplx(-1.0, 0.0);
  return closed_form(std::move(g), m_levels);
}

FilterDesign second_order(int m_levels) {
  if (m_levels < 4) {
    throw DomainError("second-order modulator needs A <= M - 3 > 0, i.e. M >= 4; got M = " +
                      std::to_string(m_levels));
  }
  CVector g(2);
  g << cplx(-2.0, 0.0), cplx(1.0, 0.0);
  return closed_form(std::move(g), m_levels);
}

FilterDesign freq_shifted(double omega_c, int m_levels) {
  if (!(omega_c > -kPi && omega_c <= kPi)) throw DomainError("omega_c must lie in (-pi, pi]");
  CVector g(1);
  g << -std::polar(1.0, omega_c);
  return closed_form(std::move(g), m_levels);
}

FilterDesign first_order_2d(int m_levels) {
  CMatrix g = CMatrix::Zero(2, 2);
  g(0, 1) = -1.0;
  g(1, 0) = -1.0;
  g(1, 1) = 1.0;
  const double a = max_safe_amplitude(iq_norm1(g), m_levels);
  return FilterDesign::two_d(std::move(g), a, m_levels);
}

CVector band_stop_coeffs(std::size_t order, double omega_c) {
  if (order == 0) throw DomainError("band-stop order L must be >= 1");
  CVector g(static_cast<Eigen::Index>(order));
  const cplx beta = -std::polar(1.0, omega_c);
  double binom = 1.0;
  cplx power(1.0, 0.0);
  for (std::size_t l = 1; l <= order; ++l) {
    binom = binom * static_cast<double>(order - l + 1) / static_cast<double>(l);
    power *= beta;
    g[static_cast<Eigen::Index>(l - 1)] = std::round(binom) * power;
  }
  return g;
}

FilterDesign band_stop(std::size_t order, double omega_c, int m_levels) {
  return closed_form(band_stop_coeffs(order, omega_c), m_levels);
}

CVector zero_noise_coeffs(std::span<const double> omegas) {
  if (omegas.empty()) throw DomainError("zero-noise design needs at least one frequency");
  // poly holds 1 + g_1 z + ... with z = e^{-j omega}; multiply by (1 + beta_k z).
  std::vector<cplx> poly(omegas.size() + 1, cplx(0.0, 0.0));
  poly[0] = 1.0;
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    const cplx beta = -std::polar(1.0, omegas[k]);
    for (std::size_t j = k + 1; j >= 1; --j) poly[j] += beta * poly[j - 1];
  }
  CVector g(static_cast<Eigen::Index>(omegas.size()));
  for (std::size_t j = 1; j < poly.size(); ++j) g[static_cast<Eigen::Index>(j - 1)] = poly[j];
  return g;
}

void SqnrContext::validate() const {
  if (!(rho > 0.0)) throw DomainError("power scale rho must be positive");
  if (!(noise_var >= 0.0)) throw DomainError("noise variance must be non-negative");
  if (n_effective == 0) throw DomainError("effective antenna count must be positive");
}

double SqnrContext::gamma(double gain_abs) const {
  validate();
  if (!(gain_abs > 0.0)) throw DomainError("channel gain magnitude must be positive");
  return 3.0 * noise_var /
         (2.0 * static_cast<double>(n_effective) * rho * gain_abs * gain_abs);
}

double Sqnr::value() const {
  if (unbounded_) throw DomainError("SQNR is unbounded");
  return value_;
}

double Sqnr::db(double cap) const {
  if (unbounded_) return cap;
  if (value_ <= 0.0) return -cap;
  return std::min(cap, 10.0 * std::log10(value_));
}

Sqnr sqnr_from_response(double amplitude, double response_sq, const SqnrContext& ctx,
                        double gain_abs) {
  ctx.validate();
  if (!(amplitude > 0.0)) throw DomainError("SQNR needs a positive amplitude A");
  const double g2 = gain_abs * gain_abs;
  const double denom =
      2.0 * static_cast<double>(ctx.n_effective) * ctx.rho * g2 / 3.0 * response_sq + ctx.noise_var;
  if (denom == 0.0) return Sqnr::unbounded();
  return Sqnr::finite(ctx.rho * g2 * amplitude * amplitude / denom);
}

Sqnr sqnr(const FilterDesign& design, const SqnrContext& ctx, cplx alpha, double omega) {
  return sqnr_from_response(design.amplitude(), std::norm(shaping_response(design, omega)), ctx,
                            std::abs(alpha));
}

Sqnr sqnr_2d(const FilterDesign& design, const SqnrContext& ctx, cplx alpha, double omega1,
             double omega2) {
  return sqnr_from_response(design.amplitude(),
                            std::norm(shaping_response_2d(design, omega1, omega2)), ctx,
                            std::abs(alpha));
}

double rnsr_at(const FilterDesign& design, double omega) {
  const double a = design.amplitude();
  return std::norm(shaping_response(design, omega)) / (a * a);
}

double rnsr(const FilterDesign& design, double theta, double spacing_ratio) {
  return rnsr_at(design, spatial_frequency(theta, spacing_ratio));
}

double rnsr_2d(const FilterDesign& design, double theta, double phi, const UpaGeometry& g) {
  const auto [w1, w2] = spatial_frequency_2d(theta, phi, g);
  const double a = design.amplitude();
  return std::norm(shaping_response_2d(design, w1, w2)) / (a * a);
}

double prop1_upper(std::size_t k) {
  if (k == 0) throw DomainError("K must be >= 1");
  return std::sqrt(2.0) * (std::ldexp(1.0, static_cast<int>(k)) - 1.0);
}

std::pair<double, double> prop2_bounds(std::size_t order) {
  if (order == 0) throw DomainError("L must be >= 1");
  const double base = std::ldexp(1.0, static_cast<int>(order)) - 1.0;
  return {base, std::sqrt(2.0) * base};
}

}  // namespace sdsm
