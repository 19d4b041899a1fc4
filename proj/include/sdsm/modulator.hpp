// SPDX-License-Identifier: Apache-2.0
//
// Error-feedback Sigma-Delta modulators, 1D (antenna index n) and 2D (raster
// over (n1, n2)). The 1D recursion is
//
//   b_n = xbar_n + sum_{l=1}^{L} g_l q_{n-l},   x_n = Qc(b_n),   q_n = x_n - b_n
//
// with q_n = 0 for n < 0. The 2D recursion sums over (l1, l2) != (0, 0).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "sdsm/kernels/modulate.hpp"
#include "sdsm/quantizer.hpp"
#include "sdsm/types.hpp"

namespace sdsm {

enum class DesignKind { OneD, TwoD };

/// Feedback coefficients plus the input amplitude bound A and level count M.
/// 1D designs hold g_1..g_L; 2D designs hold the (L1+1) x (L2+1) matrix G with
/// G(0,0) = 0.
class FilterDesign {
 public:
  static FilterDesign one_d(CVector coeffs, double amplitude, int m_levels);
  static FilterDesign two_d(CMatrix coeffs, double amplitude, int m_levels);

  DesignKind kind() const { return kind_; }
  bool is_2d() const { return kind_ == DesignKind::TwoD; }

  /// g_1..g_L (1D). Throws ShapeError on a 2D design.
  const CVector& coeffs() const;
  /// G (2D). Throws ShapeError on a 1D design.
  const CMatrix& coeffs_2d() const;

  /// L (1D only).
  std::size_t order() const;
  std::size_t order_1() const { return static_cast<std::size_t>(coeffs2_.rows() - 1); }
  std::size_t order_2() const { return static_cast<std::size_t>(coeffs2_.cols() - 1); }

  double amplitude() const { return amplitude_; }
  int m_levels() const { return m_levels_; }

  /// ||g||_IQ-1 over all coefficients.
  double coeff_iq1() const;
  /// A + ||g||_IQ-1 <= M (+ tol): the no-overload sufficient condition.
  bool overload_safe(double tol = 1e-9) const;

  FilterDesign with_amplitude(double amplitude) const;

 private:
  FilterDesign() = default;

  DesignKind kind_ = DesignKind::OneD;
  CVector coeffs1_;
  CMatrix coeffs2_;
  double amplitude_ = 1.0;
  int m_levels_ = 2;
};

struct ModulationResult {
  CVector output;  ///< x_n in X + jX (2D: row-major flattening)
  CVector errors;  ///< q_n
  std::size_t rows = 0;
  std::size_t cols = 1;
  std::size_t overload_count = 0;
  double max_error_iq = 0.0;
};

/// Design coefficients in the layout the batch kernels take.
kernels::Taps design_taps(const FilterDesign& design);

/// 1 + sum_l g_l exp(-j l omega).
cplx shaping_response(const FilterDesign& design, double omega);

/// 1 + sum_{l1,l2} g_{l1,l2} exp(-j (l1 omega1 + l2 omega2)).
cplx shaping_response_2d(const FilterDesign& design, double omega1, double omega2);

/// Runs the 1D modulator on one input sequence.
ModulationResult modulate_1d(std::span<const cplx> input, const FilterDesign& design);

/// Runs the 2D modulator on an n1 x n2 input (raster order, n1 outer).
ModulationResult modulate_2d(const CMatrix& input, const FilterDesign& design);

struct NoisePowerEstimate {
  double empirical = 0.0;
  double predicted = 0.0;  ///< (2N/3) |1 + G(omega)|^2
  std::size_t trials = 0;
  std::size_t overload_events = 0;
};

/// Monte-Carlo estimate of E|sum_n (x_n - xbar_n) e^{-j n omega}|^2 with
/// inputs i.i.d. uniform on [-A, A] per component. Trial k draws from a
/// substream of `seed`, so the estimate does not depend on `threads`.
NoisePowerEstimate measure_noise_power(const FilterDesign& design, double omega,
                                       std::size_t n_antennas, std::size_t n_trials,
                                       std::uint64_t seed, unsigned threads = 1);

/// Same Monte-Carlo draws evaluated at several frequencies at once.
std::vector<NoisePowerEstimate> measure_noise_power(const FilterDesign& design,
                                                    std::span<const double> omegas,
                                                    std::size_t n_antennas, std::size_t n_trials,
                                                    std::uint64_t seed, unsigned threads = 1);

}  // namespace sdsm
