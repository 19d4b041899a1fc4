// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "sdsm/downlink.hpp"
#include "sdsm/errors.hpp"
#include "sdsm/filter_designs.hpp"
#include "sdsm/iq_norms.hpp"
#include "sdsm/qam.hpp"

using namespace sdsm;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.ula = {64, 0.25};
  c.n_users = 4;
  c.symbols = 50;
  c.trials = 6;
  c.order = 6;
  c.seed = 77;
  c.schemes = {Scheme::SdFixedSector, Scheme::SdUserTargeted, Scheme::SdFirstOrder, Scheme::Direct,
               Scheme::Unquantized};
  c.snr_db = {10.0, 30.0};
  return c;
}

CMatrix random_symbols(std::size_t k, std::size_t t, Rng& rng) {
  CMatrix s(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
  for (Eigen::Index j = 0; j < s.cols(); ++j)
    for (Eigen::Index i = 0; i < s.rows(); ++i) s(i, j) = qam64_mod(static_cast<std::uint8_t>(rng() >> 58));
  return s;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::SdFixedSector, Scheme::SdUserTargeted, Scheme::SdFirstOrder,
                   Scheme::SdSecondOrder, Scheme::Direct, Scheme::Unquantized}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_scheme("sd-3rd"), ConfigError);
  CHECK(is_sigma_delta(Scheme::SdUserTargeted));
  CHECK_FALSE(is_sigma_delta(Scheme::Direct));
}

TEST_CASE("users respect the sector and separation") {
  ScenarioConfig c = small_config();
  c.n_users = 8;
  Rng rng = substream(3, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto users = generate_users(c, rng);
    REQUIRE(users.size() == 8);
    for (std::size_t i = 0; i < users.size(); ++i) {
      CHECK(users[i].azimuth >= c.theta_range.first);
      CHECK(users[i].azimuth <= c.theta_range.second);
      const double g = std::abs(users[i].gain);
      CHECK(g >= c.r0 / c.r1_max - 1e-12);
      CHECK(g <= c.r0 / c.r1_min + 1e-12);
      for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(users[i].azimuth - users[j].azimuth) >= c.min_separation);
    }
  }
  c.two_d = true;
  c.upa = {12, 12, 0.25, 0.25};
  for (int rep = 0; rep < 10; ++rep) {
    const auto users = generate_users(c, rng);
    for (std::size_t i = 0; i < users.size(); ++i) {
      CHECK(users[i].elevation >= c.phi_range.first);
      CHECK(users[i].elevation <= c.phi_range.second);
      for (std::size_t j = 0; j < i; ++j) {
        const bool apart = std::abs(users[i].azimuth - users[j].azimuth) >= c.min_separation ||
                           std::abs(users[i].elevation - users[j].elevation) >= c.min_separation;
        CHECK(apart);
      }
    }
  }
}

TEST_CASE("zero-forcing inverse") {
  ScenarioConfig c = small_config();
  Rng rng = substream(4, 0);
  const auto users = generate_users(c, rng);
  const CMatrix h = channel_matrix(users, c.ula);
  const CMatrix p = zf_pseudo_inverse(h);
  CHECK((h * p - CMatrix::Identity(4, 4)).norm() < 1e-10);
  CMatrix dup = h;
  dup.row(1) = dup.row(0);
  CHECK_THROWS_AS(zf_pseudo_inverse(dup), NumericalError);
}

TEST_CASE("transmit schemes respect the peak constraint") {
  ScenarioConfig c = small_config();
  Rng rng = substream(5, 0);
  const auto users = generate_users(c, rng);
  const CMatrix h = channel_matrix(users, c.ula);
  const CMatrix p = zf_pseudo_inverse(h);
  const CMatrix s = random_symbols(4, 50, rng);
  const int m = c.m_levels;

  const TransmitBlock un = unquantized_transmit(p, s, m);
  CHECK(iq_norms(un.x).iqinf <= m - 1 + 1e-12);
  const TransmitBlock dq = direct_quant_transmit(p, s, m);
  CHECK(iq_norms(dq.x).iqinf <= m - 1);
  for (Eigen::Index i = 0; i < dq.x.size(); ++i) {
    const cplx v = dq.x.data()[i];
    CHECK(std::fmod(v.real() + m - 1, 2.0) == 0.0);
    CHECK(std::fmod(v.imag() + m - 1, 2.0) == 0.0);
  }

  const FilterDesign d = first_order(m);
  const auto omegas = user_frequencies(c, users);
  const RVector load = noise_loading(d, users, omegas, {1.0, 1.0, c.n_antennas()});
  const TransmitBlock sd = sd_transmit(p, load, s, d);
  CHECK(sd.overloads == 0);
  CHECK(sd.peak_input <= d.amplitude() + 1e-9);
  CHECK(iq_norms(sd.x).iqinf <= m - 1);
  CHECK(sd.gains.size() == 4);
}

TEST_CASE("noiseless unquantized link is error free") {
  ScenarioConfig c = small_config();
  Rng rng = substream(6, 0);
  const auto users = generate_users(c, rng);
  const CMatrix h = channel_matrix(users, c.ula);
  const CMatrix s = random_symbols(4, 50, rng);
  const TransmitBlock un = unquantized_transmit(zf_pseudo_inverse(h), s, c.m_levels);
  const auto labels = receive_and_detect(h, un, 1.0, CMatrix::Zero(4, 50));
  for (Eigen::Index j = 0; j < 50; ++j)
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(labels[static_cast<std::size_t>(i * 50 + j)] == qam64_demod(s(i, j)));
}

TEST_CASE("BER campaign is deterministic and thread invariant") {
  const ScenarioConfig c = small_config();
  const BerReport a = run_ber(c, 1);
  const BerReport b = run_ber(c, 3);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.points.size() == 10);
  for (const auto& p : a.points) {
    CHECK(p.bits == 6u * 4u * 50u * 6u);
    if (is_sigma_delta(p.scheme)) CHECK(p.overloads == 0);
  }
  CHECK(a.at(Scheme::Unquantized, 30.0).ber() <= a.at(Scheme::Direct, 30.0).ber());
  CHECK(a.at(Scheme::SdFixedSector, 30.0).ber() <= a.at(Scheme::SdFixedSector, 10.0).ber());
  CHECK_THROWS(a.at(Scheme::SdSecondOrder, 30.0));
  ScenarioConfig c2 = c;
  c2.seed = 78;
  CHECK(run_ber(c2, 1).to_csv() != a.to_csv());
}

TEST_CASE("scenario validation") {
  ScenarioConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  auto bad = [&](auto mutate) {
    ScenarioConfig x = small_config();
    mutate(x);
    CHECK_THROWS_AS(x.validate(), ConfigError);
  };
  bad([](ScenarioConfig& x) { x.n_users = 65; });
  bad([](ScenarioConfig& x) { x.m_levels = 3; x.schemes = {Scheme::SdSecondOrder}; });
  bad([](ScenarioConfig& x) { x.m_levels = 1; });
  bad([](ScenarioConfig& x) { x.schemes = {Scheme::Direct, Scheme::Direct}; });
  bad([](ScenarioConfig& x) { x.schemes = {}; });
  bad([](ScenarioConfig& x) { x.trials = 0; });
  bad([](ScenarioConfig& x) { x.r1_min = 200.0; });
  // 60 degrees at 1 degree separation cannot hold 62 users.
  bad([](ScenarioConfig& x) { x.n_users = 62; });
  bad([](ScenarioConfig& x) { x.two_d = true; x.upa = {8, 8, 0.25, 0.25}; x.schemes = {Scheme::SdSecondOrder}; });
}
