// SPDX-License-Identifier: Apache-2.0
//
// M-level mid-rise/mid-tread quantizer over the alphabet
//   {+-1, +-3, ..., +-(M-1)}   (M even)
//   {0, +-2, ..., +-(M-1)}     (M odd)
// Ties round toward +infinity, so Q(0) = +1 for M = 2.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sdsm/types.hpp"

namespace sdsm {

/// Quantization errors whose IQ-infinity magnitude exceeds 1 + this count as overload.
inline constexpr double kOverloadTolerance = 1e-12;

/// Nearest alphabet level, no argument checks. Shared by every kernel so that
/// scalar and vector paths round identically.
inline double quantize_level(double y, int m_levels) {
  const double top = static_cast<double>(m_levels - 1);
  double v = (m_levels % 2 == 0) ? std::floor(y * 0.5) * 2.0 + 1.0
                                 : std::floor((y + 1.0) * 0.5) * 2.0;
  return std::min(std::max(v, -top), top);
}

class SignalSet {
 public:
  /// Throws DomainError for M < 2.
  explicit SignalSet(int m_levels);

  int m_levels() const { return m_levels_; }
  const std::vector<double>& levels() const { return levels_; }
  double max_level() const { return static_cast<double>(m_levels_ - 1); }

  /// Nearest level; saturates at +-(M-1). Throws DomainError on non-finite input.
  double quantize(double y) const;
  cplx quantize(cplx z) const;

 private:
  int m_levels_;
  std::vector<double> levels_;
};

}  // namespace sdsm
