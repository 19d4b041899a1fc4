// SPDX-License-Identifier: Apache-2.0
//
// Array geometry and far-field angular channels for uniform linear (ULA) and
// uniform planar (UPA) arrays. All angles are radians.

#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "sdsm/types.hpp"

namespace sdsm {

/// N-element uniform linear array with inter-element spacing d = ratio * wavelength.
struct UlaGeometry {
  std::size_t n_antennas = 1;
  double spacing_ratio = 0.5;

  /// Throws DomainError when N = 0 or d/lambda is outside (0, 0.5].
  void validate() const;
};

/// n1 x n2 uniform planar array. Axis 1 is horizontal (azimuth), axis 2 vertical.
struct UpaGeometry {
  std::size_t n1 = 1;
  std::size_t n2 = 1;
  double spacing_ratio_1 = 0.5;
  double spacing_ratio_2 = 0.5;

  void validate() const;
  std::size_t n_antennas() const { return n1 * n2; }
};

/// Single-path channel of one user: h = gain * a(theta[, phi]).
/// The 1D case ignores `elevation`.
struct UserChannel {
  cplx gain{1.0, 0.0};
  double azimuth = 0.0;
  double elevation = 0.0;

  void validate() const;
};

/// omega = 2 pi (d/lambda) sin(theta).
double spatial_frequency(double theta, double spacing_ratio);

/// (omega1, omega2) = (2 pi d1/lambda cos(phi) sin(theta), 2 pi d2/lambda sin(phi)).
std::pair<double, double> spatial_frequency_2d(double theta, double phi, const UpaGeometry& g);

/// Element k is exp(-j k omega), k = 0..n-1.
CVector steering_vector(double omega, std::size_t n);

/// A(theta, phi) = a1 a2^T, entry (k1, k2) = exp(-j (k1 omega1 + k2 omega2)).
CMatrix upa_response(double theta, double phi, const UpaGeometry& g);

/// Materializes h_i = alpha_i a(theta_i) for a ULA.
CVector channel_vector(const UserChannel& user, const UlaGeometry& g);

/// Materializes vec(H_i) for a UPA, row-major flattening (n1 outer, n2 inner),
/// the same ordering the 2D modulator scans.
CVector channel_vector(const UserChannel& user, const UpaGeometry& g);

/// Stacks user channels as the rows of H (K x N).
CMatrix channel_matrix(std::span<const UserChannel> users, const UlaGeometry& g);
CMatrix channel_matrix(std::span<const UserChannel> users, const UpaGeometry& g);

}  // namespace sdsm
