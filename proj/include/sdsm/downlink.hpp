// SPDX-License-Identifier: Apache-2.0
//
// Link-level downlink simulator: random users in an angular sector, ZF
// precoding, and the transmit schemes compared in the BER campaigns:
//
//   sd-*     xbar_t = (A/C) H^+ D s_t, then Sigma-Delta modulation
//   direct   x_t = Qc(M H^+ s_t / C)
//   unquant  x_t = ((M-1)/C) H^+ s_t
//
// Each receiver scales by its known effective gain and slices to 64-QAM.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdsm/array_model.hpp"
#include "sdsm/conic_design.hpp"
#include "sdsm/modulator.hpp"
#include "sdsm/rng.hpp"
#include "sdsm/types.hpp"

namespace sdsm {

enum class Scheme { SdFixedSector, SdUserTargeted, SdFirstOrder, SdSecondOrder, Direct, Unquantized };

std::string_view scheme_name(Scheme s);
/// Accepts sd-fs, sd-ut, sd-1st, sd-2nd, direct, unquant. Throws ConfigError otherwise.
Scheme parse_scheme(std::string_view name);
bool is_sigma_delta(Scheme s);

struct ScenarioConfig {
  bool two_d = false;
  UlaGeometry ula{256, 0.25};
  UpaGeometry upa{40, 40, 0.25, 0.25};
  std::size_t n_users = 8;
  std::pair<double, double> theta_range{-kPi / 6, kPi / 6};  ///< radians
  std::pair<double, double> phi_range{0.0, kPi / 9};         ///< 2D only, radians
  double min_separation = kPi / 180;                          ///< radians
  double r0 = 30.0;                                           ///< |alpha| = r0 / r1
  double r1_min = 20.0;
  double r1_max = 100.0;
  int m_levels = 5;
  std::vector<Scheme> schemes{Scheme::SdFixedSector, Scheme::SdFirstOrder, Scheme::Direct,
                              Scheme::Unquantized};
  std::vector<double> snr_db{30.0};
  std::size_t symbols = 500;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t order = 16;   ///< 1D design order L
  std::size_t order_1 = 5;  ///< 2D design orders
  std::size_t order_2 = 5;
  std::size_t design_samples = 0;  ///< 1D fixed-sector samples, 0 = default
  std::size_t grid_theta = 33;
  std::size_t grid_phi = 33;
  double design_tol = 1e-8;
  std::size_t max_redraws = 10;  ///< per trial, when a user-targeted solve fails

  /// Throws ConfigError on any invalid or incompatible setting.
  void validate() const;
  std::size_t n_antennas() const { return two_d ? upa.n_antennas() : ula.n_antennas; }
};

/// Rejection-samples K users at pairwise angular separation >= min_separation
/// (2D: separated in azimuth or in elevation) with |alpha| = r0 / U[r1_min, r1_max]
/// and uniform phase.
std::vector<UserChannel> generate_users(const ScenarioConfig& cfg, Rng& rng);

/// Spatial frequency of each user, (omega, 0) for 1D.
std::vector<std::pair<double, double>> user_frequencies(const ScenarioConfig& cfg,
                                                        std::span<const UserChannel> users);

/// sigma_{w,i} = sqrt(rho |alpha_i|^2 (2N/3) |1+G(omega_i)|^2 + sigma^2), floored at 1e-12.
RVector noise_loading(const FilterDesign& design, std::span<const UserChannel> users,
                      std::span<const std::pair<double, double>> omegas, const SqnrContext& ctx);

/// H^+ = H^H (H H^H)^{-1}. Throws NumericalError if H H^H is singular.
CMatrix zf_pseudo_inverse(const CMatrix& h);

struct TransmitBlock {
  CMatrix x;           ///< N x T transmitted signals
  RVector gains;       ///< per-user effective receive gain (without sqrt(rho))
  std::size_t overloads = 0;
  double peak_input = 0.0;  ///< max ||xbar_t||_IQ-inf before modulation (Sigma-Delta only)
};

/// Sigma-Delta scheme. `symbols` is K x T. 2D designs take N1 x N2 raster inputs.
TransmitBlock sd_transmit(const CMatrix& h_pinv, const RVector& loading, const CMatrix& symbols,
                          const FilterDesign& design, const UpaGeometry* upa = nullptr);
TransmitBlock direct_quant_transmit(const CMatrix& h_pinv, const CMatrix& symbols, int m_levels);
TransmitBlock unquantized_transmit(const CMatrix& h_pinv, const CMatrix& symbols, int m_levels);

/// y = sqrt(rho) H x + noise, scaled by 1/(sqrt(rho) gain_i) and sliced.
/// `noise` is K x T. Returns K x T labels. Throws NumericalError on zero gain.
std::vector<std::uint8_t> receive_and_detect(const CMatrix& h, const TransmitBlock& tx, double rho,
                                             const CMatrix& noise);

struct BerPoint {
  Scheme scheme = Scheme::Direct;
  double snr_db = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t overloads = 0;
  double ber() const { return bits == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits); }
};

struct BerReport {
  std::vector<BerPoint> points;  ///< scheme-major, then SNR in config order
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t redraws = 0;       ///< user sets redrawn after a failed user-targeted solve
  std::size_t loading_floors = 0;  ///< sigma_w values clamped to the floor

  const BerPoint& at(Scheme s, double snr_db) const;
  std::string to_csv() const;
};

/// Designs used for the run-level (non user-targeted) Sigma-Delta schemes.
FilterDesign run_level_design(const ScenarioConfig& cfg, Scheme s);

BerReport run_ber(const ScenarioConfig& cfg, unsigned threads = 0);

}  // namespace sdsm
