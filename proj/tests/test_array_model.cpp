// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <vector>

#include "sdsm/array_model.hpp"
#include "sdsm/errors.hpp"

using namespace sdsm;

TEST_CASE("spatial frequency of a ULA") {
  CHECK(spatial_frequency(0.0, 0.5) == 0.0);
  CHECK(spatial_frequency(deg2rad(30.0), 0.25) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(spatial_frequency(deg2rad(-30.0), 0.25) == doctest::Approx(-kPi / 4).epsilon(1e-14));
  CHECK_THROWS_AS(spatial_frequency(kPi / 2, 0.5), DomainError);
  CHECK_THROWS_AS(spatial_frequency(0.1, 0.0), DomainError);
  CHECK_THROWS_AS(spatial_frequency(0.1, 0.6), DomainError);
}

TEST_CASE("2D spatial frequency") {
  const UpaGeometry g{4, 4, 0.5, 0.25};
  const auto [w1, w2] = spatial_frequency_2d(deg2rad(30.0), deg2rad(60.0), g);
  CHECK(w1 == doctest::Approx(2 * kPi * 0.5 * 0.5 * 0.5));
  CHECK(w2 == doctest::Approx(2 * kPi * 0.25 * std::sin(deg2rad(60.0))));
  const auto z = spatial_frequency_2d(0.0, 0.0, g);
  CHECK(z.first == 0.0);
  CHECK(z.second == 0.0);
}

TEST_CASE("steering vector entries") {
  const CVector a = steering_vector(0.3, 5);
  REQUIRE(a.size() == 5);
  for (Eigen::Index k = 0; k < 5; ++k) {
    CHECK(std::abs(a[k]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::arg(a[k]) == doctest::Approx(std::remainder(-0.3 * static_cast<double>(k), 2 * kPi)));
  }
  CHECK(a[0] == cplx(1.0, 0.0));
  // Conjugate symmetry in omega.
  const CVector b = steering_vector(-0.3, 5);
  CHECK((a.conjugate() - b).norm() == 0.0);
  CHECK_THROWS_AS(steering_vector(0.1, 0), DomainError);
}

TEST_CASE("UPA response is an outer product and flattens row-major") {
  const UpaGeometry g{3, 2, 0.5, 0.5};
  const double th = deg2rad(20.0), ph = deg2rad(10.0);
  const CMatrix a = upa_response(th, ph, g);
  const auto [w1, w2] = spatial_frequency_2d(th, ph, g);
  REQUIRE(a.rows() == 3);
  REQUIRE(a.cols() == 2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(a(i, j) - std::polar(1.0, -(i * w1 + j * w2))) < 1e-14);
    }
  }
  const UserChannel u{cplx(0.5, 0.5), th, ph};
  const CVector h = channel_vector(u, g);
  REQUIRE(h.size() == 6);
  CHECK(std::abs(h[1 * 2 + 1] - u.gain * a(1, 1)) < 1e-15);
}

TEST_CASE("channel matrix stacks user rows") {
  const UlaGeometry g{8, 0.25};
  const std::vector<UserChannel> users{{cplx(1.0, 0.0), 0.1, 0.0}, {cplx(0.0, 2.0), -0.4, 0.0}};
  const CMatrix h = channel_matrix(users, g);
  REQUIRE(h.rows() == 2);
  REQUIRE(h.cols() == 8);
  CHECK((h.row(1).transpose() - channel_vector(users[1], g)).norm() == 0.0);
  CHECK(std::abs(h(1, 0) - cplx(0.0, 2.0)) == 0.0);
  CHECK_THROWS_AS(channel_matrix(std::vector<UserChannel>{}, g), DomainError);
  const std::vector<UserChannel> bad{{cplx(0.0, 0.0), 0.1, 0.0}};
  CHECK_THROWS_AS(channel_matrix(bad, g), DomainError);
}
