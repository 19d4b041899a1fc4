// SPDX-License-Identifier: Apache-2.0

#include "sdsm/array_model.hpp"

#include <cmath>
#include <string>

#include "sdsm/errors.hpp"

namespace sdsm {

namespace {

void check_angle(double a, const char* name) {
  if (!(std::isfinite(a) && a > -kPi / 2 && a < kPi / 2)) {
    throw DomainError(std::string(name) + " must lie in (-pi/2, pi/2), got " + std::to_string(a));
  }
}

void check_spacing(double r) {
  if (!(r > 0.0 && r <= 0.5)) {
    throw DomainError("spacing ratio d/lambda must lie in (0, 0.5], got " + std::to_string(r));
  }
}

}  // namespace

void UlaGeometry::validate() const {
  if (n_antennas == 0) throw DomainError("ULA needs at least one antenna");
  check_spacing(spacing_ratio);
}

void UpaGeometry::validate() const {
  if (n1 == 0 || n2 == 0) throw DomainError("UPA needs at least one antenna per axis");
  check_spacing(spacing_ratio_1);
  check_spacing(spacing_ratio_2);
}

void UserChannel::validate() const {
  if (!(std::abs(gain) > 0.0)) throw DomainError("channel gain must be non-zero");
  check_angle(azimuth, "azimuth");
  check_angle(elevation, "elevation");
}

double spatial_frequency(double theta, double spacing_ratio) {
  check_angle(theta, "theta");
  check_spacing(spacing_ratio);
  return 2.0 * kPi * spacing_ratio * std::sin(theta);
}

std::pair<double, double> spatial_frequency_2d(double theta, double phi, const UpaGeometry& g) {
  check_angle(theta, "theta");
  check_angle(phi, "phi");
  g.validate();
  return {2.0 * kPi * g.spacing_ratio_1 * std::cos(phi) * std::sin(theta),
          2.0 * kPi * g.spacing_ratio_2 * std::sin(phi)};
}

CVector steering_vector(double omega, std::size_t n) {
  if (n == 0) throw DomainError("steering vector length must be positive");
  CVector a(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    // std::polar keeps |a_k| == 1 and conj symmetry exact (sin is odd).
    a[static_cast<Eigen::Index>(k)] = std::polar(1.0, -static_cast<double>(k) * omega);
  }
  return a;
}

CMatrix upa_response(double theta, double phi, const UpaGeometry& g) {
  const auto [w1, w2] = spatial_frequency_2d(theta, phi, g);
  const CVector a1 = steering_vector(w1, g.n1);
  const CVector a2 = steering_vector(w2, g.n2);
  return a1 * a2.transpose();
}

CVector channel_vector(const UserChannel& user, const UlaGeometry& g) {
  g.validate();
  return user.gain * steering_vector(spatial_frequency(user.azimuth, g.spacing_ratio), g.n_antennas);
}

CVector channel_vector(const UserChannel& user, const UpaGeometry& g) {
  const CMatrix a = upa_response(user.azimuth, user.elevation, g);
  CVector h(static_cast<Eigen::Index>(g.n_antennas()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) h[i * a.cols() + j] = user.gain * a(i, j);
  }
  return h;
}

namespace {

template <typename Geometry>
CMatrix stack_channels(std::span<const UserChannel> users, const Geometry& g) {
  if (users.empty()) throw DomainError("at least one user is required");
  for (const auto& u : users) u.validate();
  CVector first = channel_vector(users[0], g);
  CMatrix h(static_cast<Eigen::Index>(users.size()), first.size());
  h.row(0) = first.transpose();
  for (std::size_t i = 1; i < users.size(); ++i) {
    h.row(static_cast<Eigen::Index>(i)) = channel_vector(users[i], g).transpose();
  }
  return h;
}

}  // namespace

CMatrix channel_matrix(std::span<const UserChannel> users, const UlaGeometry& g) {
  return stack_channels(users, g);
}

CMatrix channel_matrix(std::span<const UserChannel> users, const UpaGeometry& g) {
  return stack_channels(users, g);
}

}  // namespace sdsm
