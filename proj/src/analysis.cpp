// SPDX-License-Identifier: Apache-2.0

#include "sdsm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sdsm/errors.hpp"
#include "sdsm/filter_designs.hpp"
#include "sdsm/iq_norms.hpp"
#include "sdsm/parallel.hpp"
#include "sdsm/rng.hpp"

namespace sdsm {

double to_db_floored(double v) { return v > 0.0 ? 10.0 * std::log10(v) : kRnsrFloorDb; }

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) throw DomainError("linspace needs at least one point");
  if (n == 1) return {0.5 * (lo + hi)};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  v.back() = hi;
  return v;
}

NormStats table1_stats(std::size_t k, std::size_t n_samples, std::uint64_t seed, unsigned threads) {
  if (k == 0) throw DomainError("K must be >= 1");
  if (n_samples == 0) throw DomainError("need at least one sample");
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  struct Partial {
    double min = INFINITY, max = 0.0, sum = 0.0, sum_sq = 0.0;
  };
  std::vector<Partial> parts(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Rng rng = substream(seed, c, static_cast<std::uint32_t>(k));
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::vector<double> w(k);
    Partial& p = parts[c];
    const std::size_t end = std::min(n_samples, (c + 1) * kChunk);
    for (std::size_t s = c * kChunk; s < end; ++s) {
      for (auto& x : w) x = u(rng);
      const double n = iq_norm1(zero_noise_coeffs(w));
      p.min = std::min(p.min, n);
      p.max = std::max(p.max, n);
      p.sum += n;
      p.sum_sq += n * n;
    }
  });
  NormStats st{k, INFINITY, 0.0, 0.0, 0.0, n_samples, seed};
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& p : parts) {
    st.min = std::min(st.min, p.min);
    st.max = std::max(st.max, p.max);
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  st.mean = sum / static_cast<double>(n_samples);
  st.rms = std::sqrt(sum_sq / static_cast<double>(n_samples));
  return st;
}

NoiseModelReport validate_noise_model(const FilterDesign& design, std::span<const double> omegas,
                                      std::size_t n_antennas, std::size_t n_trials,
                                      std::uint64_t seed, unsigned threads) {
  if (design.is_2d()) throw DomainError("noise-model validation takes a 1D design");
  if (!design.overload_safe()) throw DomainError("noise-model validation needs an overload-safe design");
  const auto est = measure_noise_power(design, omegas, n_antennas, n_trials, seed, threads);
  NoiseModelReport rep;
  double emp = 0.0, pred = 0.0;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    NoiseModelPoint p{omegas[i], est[i].empirical, est[i].predicted, 0.0, false};
    p.excluded = std::abs(shaping_response(design, omegas[i])) < 1e-3;
    if (!p.excluded) {
      p.ratio_db = 10.0 * std::log10(p.empirical / p.predicted);
      emp += p.empirical;
      pred += p.predicted;
    }
    rep.points.push_back(p);
  }
  if (!est.empty()) rep.overload_events = est.front().overload_events;
  rep.pooled_ratio_db = pred > 0.0 ? 10.0 * std::log10(emp / pred) : 0.0;
  return rep;
}

std::vector<RnsrPoint> rnsr_sweep(const FilterDesign& design, std::span<const double> thetas,
                                  double spacing_ratio) {
  if (thetas.empty()) throw DomainError("RNSR sweep needs at least one angle");
  std::vector<RnsrPoint> out;
  out.reserve(thetas.size());
  for (double th : thetas) {
    const double r = rnsr(design, th, spacing_ratio);
    out.push_back({th, 0.0, r, to_db_floored(r)});
  }
  return out;
}

std::vector<RnsrPoint> rnsr_sweep_2d(const FilterDesign& design, std::span<const double> thetas,
                                     std::span<const double> phis, const UpaGeometry& g) {
  if (thetas.empty() || phis.empty()) throw DomainError("RNSR sweep needs at least one angle");
  std::vector<RnsrPoint> out;
  out.reserve(thetas.size() * phis.size());
  for (double th : thetas) {
    for (double ph : phis) {
      const double r = rnsr_2d(design, th, ph, g);
      out.push_back({th, ph, r, to_db_floored(r)});
    }
  }
  return out;
}

double worst_rnsr(std::span<const RnsrPoint> sweep) {
  double w = 0.0;
  for (const auto& p : sweep) w = std::max(w, p.rnsr);
  return w;
}

BandStopBounds band_stop_bounds(std::size_t order, std::size_t n_samples, std::uint64_t seed) {
  if (order == 0) throw DomainError("order must be >= 1");
  const auto [lo, hi] = prop2_bounds(order);
  BandStopBounds b{order, lo, INFINITY, 0.0, hi, iq_norm1(band_stop_coeffs(order, 0.0)), n_samples};
  Rng rng = substream(seed, order, 0x50);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double n = iq_norm1(band_stop_coeffs(order, u(rng)));
    b.min_norm = std::min(b.min_norm, n);
    b.max_norm = std::max(b.max_norm, n);
  }
  if (n_samples == 0) b.min_norm = b.max_norm = b.norm_at_zero;
  return b;
}

}  // namespace sdsm
