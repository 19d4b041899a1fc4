// SPDX-License-Identifier: Apache-2.0
//
// Square 64-QAM with per-axis Gray labels and unit average energy. A symbol
// carries 6 bits: the high three select the in-phase level, the low three the
// quadrature level.

#pragma once

#include <cstdint>

#include "sdsm/types.hpp"

namespace sdsm {

inline constexpr int kQamBits = 6;

/// Scale that brings the {-7, ..., 7} grid to unit average energy: 1/sqrt(42).
double qam64_scale();

/// Maps the low 6 bits of `bits` to a constellation point.
cplx qam64_mod(std::uint8_t bits);

/// Nearest constellation point, returned as its 6-bit label. Throws DomainError
/// on non-finite input.
std::uint8_t qam64_demod(cplx y);

}  // namespace sdsm
