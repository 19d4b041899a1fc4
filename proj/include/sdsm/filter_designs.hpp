// SPDX-License-Identifier: Apache-2.0
//
// Closed-form noise-shaping designs and the figures of merit used to compare
// them: per-user SQNR and the relative noise-shaping response (RNSR).

#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <utility>

#include "sdsm/array_model.hpp"
#include "sdsm/iq_norms.hpp"
#include "sdsm/modulator.hpp"

namespace sdsm {

/// Largest overload-safe amplitude M - ||g||_IQ-1. Throws DomainError if it is not positive.
double max_safe_amplitude(double coeff_iq1, int m_levels);

/// g = (-1), A = M - 1.
FilterDesign first_order(int m_levels);
/// g = (-2, 1), A = M - 3; needs M >= 4.
FilterDesign second_order(int m_levels);
/// g = (-e^{j omega_c}), A = M - ||g||_IQ-1.
FilterDesign freq_shifted(double omega_c, int m_levels);
/// 2D separable first order, 1 + G = (1 - e^{-j w1})(1 - e^{-j w2}), A = M - 3.
FilterDesign first_order_2d(int m_levels);

/// g_l = C(L, l) (-e^{j omega_c})^l, l = 1..L.
CVector band_stop_coeffs(std::size_t order, double omega_c);
FilterDesign band_stop(std::size_t order, double omega_c, int m_levels);

/// Coefficients of prod_k (1 - e^{-j(omega - omega_k)}) - 1, i.e. the
/// elementary symmetric polynomials of beta_k = -e^{j omega_k}, expanded one
/// root at a time.
CVector zero_noise_coeffs(std::span<const double> omegas);

/// Power scale, background noise and effective array size entering the SQNR.
struct SqnrContext {
  double rho = 1.0;
  double noise_var = 0.0;
  std::size_t n_effective = 1;

  void validate() const;
  /// gamma = 3 sigma^2 / (2 N rho |alpha|^2).
  double gamma(double gain_abs) const;
};

/// Linear SQNR that may be unbounded (perfect notch with no background noise).
/// Unbounded compares greater than every finite value.
class Sqnr {
 public:
  static Sqnr finite(double v) { return Sqnr(v, false); }
  static Sqnr unbounded() { return Sqnr(0.0, true); }

  bool is_unbounded() const { return unbounded_; }
  /// Throws if unbounded.
  double value() const;
  /// 10 log10, with +infinity mapped to `cap`.
  double db(double cap = 400.0) const;

  friend bool operator==(const Sqnr& a, const Sqnr& b) {
    return a.unbounded_ == b.unbounded_ && (a.unbounded_ || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(const Sqnr& a, const Sqnr& b) {
    if (a.unbounded_ || b.unbounded_) return a.unbounded_ <=> b.unbounded_;
    return a.value_ <=> b.value_;
  }

 private:
  Sqnr(double v, bool u) : value_(v), unbounded_(u) {}
  double value_;
  bool unbounded_;
};

/// rho |alpha|^2 A^2 / ((2 N rho |alpha|^2 / 3) |1+G|^2 + sigma^2).
Sqnr sqnr_from_response(double amplitude, double response_sq, const SqnrContext& ctx,
                        double gain_abs);
Sqnr sqnr(const FilterDesign& design, const SqnrContext& ctx, cplx alpha, double omega);
Sqnr sqnr_2d(const FilterDesign& design, const SqnrContext& ctx, cplx alpha, double omega1,
             double omega2);

/// |1 + G(omega)|^2 / A^2 evaluated at omega = 2 pi (d/lambda) sin(theta).
double rnsr(const FilterDesign& design, double theta, double spacing_ratio);
double rnsr_at(const FilterDesign& design, double omega);
double rnsr_2d(const FilterDesign& design, double theta, double phi, const UpaGeometry& g);

/// sqrt(2) (2^K - 1).
double prop1_upper(std::size_t k);
/// (2^L - 1, sqrt(2) (2^L - 1)).
std::pair<double, double> prop2_bounds(std::size_t order);

}  // namespace sdsm
