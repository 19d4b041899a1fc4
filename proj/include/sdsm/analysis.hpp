// SPDX-License-Identifier: Apache-2.0
//
// Table reproduction, bound sweeps and empirical checks of the noise model.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdsm/array_model.hpp"
#include "sdsm/modulator.hpp"

namespace sdsm {

/// RNSR values of exactly zero are written as this many dB.
inline constexpr double kRnsrFloorDb = -400.0;

/// 10 log10(v), or kRnsrFloorDb for v <= 0.
double to_db_floored(double v);

struct NormStats {
  std::size_t k = 0;
  double min = 0.0;
  double mean = 0.0;
  double rms = 0.0;
  double max = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Statistics of ||g||_IQ-1 for the zero-noise design at K i.i.d. uniform
/// (-pi, pi) frequencies.
NormStats table1_stats(std::size_t k, std::size_t n_samples, std::uint64_t seed,
                       unsigned threads = 0);

/// Published mean and RMS for K = 2..8.
struct Table1Reference {
  std::size_t k;
  double mean;
  double rms;
};
inline constexpr std::array<Table1Reference, 7> kTable1Reference{{
    {2, 2.89, 3.01}, {3, 5.28, 5.60}, {4, 8.37, 9.27}, {5, 12.85, 14.72},
    {6, 18.83, 22.53}, {7, 27.17, 33.78}, {8, 38.06, 50.37},
}};

struct NoiseModelPoint {
  double omega = 0.0;
  double empirical = 0.0;
  double predicted = 0.0;
  double ratio_db = 0.0;  ///< 10 log10(empirical / predicted); 0 when excluded
  bool excluded = false;  ///< deep notch, |1 + G| < 1e-3
};

struct NoiseModelReport {
  std::vector<NoiseModelPoint> points;
  double pooled_ratio_db = 0.0;  ///< over the non-excluded points
  std::size_t overload_events = 0;
};

NoiseModelReport validate_noise_model(const FilterDesign& design, std::span<const double> omegas,
                                      std::size_t n_antennas, std::size_t n_trials,
                                      std::uint64_t seed, unsigned threads = 0);

struct RnsrPoint {
  double theta = 0.0;
  double phi = 0.0;
  double rnsr = 0.0;
  double db = 0.0;
};

std::vector<RnsrPoint> rnsr_sweep(const FilterDesign& design, std::span<const double> thetas,
                                  double spacing_ratio);

/// Rows over theta, phi inner.
std::vector<RnsrPoint> rnsr_sweep_2d(const FilterDesign& design, std::span<const double> thetas,
                                     std::span<const double> phis, const UpaGeometry& g);

/// Largest RNSR over a sweep.
double worst_rnsr(std::span<const RnsrPoint> sweep);

struct BandStopBounds {
  std::size_t order = 0;
  double lower = 0.0;
  double min_norm = 0.0;
  double max_norm = 0.0;
  double upper = 0.0;
  double norm_at_zero = 0.0;
  std::size_t n_samples = 0;
};

/// ||g||_IQ-1 of the band-stop design for uniform random omega_c, alongside the
/// 2^L - 1 and sqrt(2)(2^L - 1) bounds.
BandStopBounds band_stop_bounds(std::size_t order, std::size_t n_samples, std::uint64_t seed);

/// n equally spaced points on [lo, hi]; a single point is the midpoint.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace sdsm
