// SPDX-License-Identifier: Apache-2.0

#include "sdsm/modulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdsm/errors.hpp"
#include "sdsm/iq_norms.hpp"
#include "sdsm/kernels/modulate.hpp"
#include "sdsm/parallel.hpp"
#include "sdsm/rng.hpp"

namespace sdsm {

// ---------------------------------------------------------------- SignalSet

SignalSet::SignalSet(int m_levels) : m_levels_(m_levels) {
  if (m_levels < 2) throw DomainError("quantizer needs M >= 2 levels, got " + std::to_string(m_levels));
  levels_.reserve(static_cast<std::size_t>(m_levels));
  for (int k = 0; k < m_levels; ++k) levels_.push_back(static_cast<double>(2 * k - (m_levels - 1)));
}

double SignalSet::quantize(double y) const {
  if (!std::isfinite(y)) throw DomainError("cannot quantize a non-finite value");
  return quantize_level(y, m_levels_);
}

cplx SignalSet::quantize(cplx z) const { return {quantize(z.real()), quantize(z.imag())}; }

// ------------------------------------------------------------- FilterDesign

namespace {

void check_design_scalars(double amplitude, int m_levels) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("input amplitude A must be positive and finite");
  }
  if (m_levels < 2) throw DomainError("quantizer needs M >= 2 levels");
}

}  // namespace

FilterDesign FilterDesign::one_d(CVector coeffs, double amplitude, int m_levels) {
  if (coeffs.size() < 1) throw DomainError("1D design needs order L >= 1");
  if (!coeffs.allFinite()) throw DomainError("design coefficients must be finite");
  check_design_scalars(amplitude, m_levels);
  FilterDesign d;
  d.kind_ = DesignKind::OneD;
  d.coeffs1_ = std::move(coeffs);
  d.amplitude_ = amplitude;
  d.m_levels_ = m_levels;
  return d;
}

FilterDesign FilterDesign::two_d(CMatrix coeffs, double amplitude, int m_levels) {
  if (coeffs.rows() < 1 || coeffs.cols() < 1 || coeffs.size() < 2) {
    throw DomainError("2D design needs at least one free coefficient");
  }
  if (coeffs(0, 0) != cplx(0.0, 0.0)) throw DomainError("2D design requires g(0,0) = 0");
  if (!coeffs.allFinite()) throw DomainError("design coefficients must be finite");
  check_design_scalars(amplitude, m_levels);
  FilterDesign d;
  d.kind_ = DesignKind::TwoD;
  d.coeffs2_ = std::move(coeffs);
  d.amplitude_ = amplitude;
  d.m_levels_ = m_levels;
  return d;
}

const CVector& FilterDesign::coeffs() const {
  if (kind_ != DesignKind::OneD) throw ShapeError("design is 2D; 1D coefficients requested");
  return coeffs1_;
}

const CMatrix& FilterDesign::coeffs_2d() const {
  if (kind_ != DesignKind::TwoD) throw ShapeError("design is 1D; 2D coefficients requested");
  return coeffs2_;
}

std::size_t FilterDesign::order() const { return static_cast<std::size_t>(coeffs().size()); }

double FilterDesign::coeff_iq1() const {
  return kind_ == DesignKind::OneD ? iq_norm1(coeffs1_) : iq_norm1(coeffs2_);
}

bool FilterDesign::overload_safe(double tol) const {
  return amplitude_ + coeff_iq1() <= static_cast<double>(m_levels_) + tol;
}

FilterDesign FilterDesign::with_amplitude(double amplitude) const {
  check_design_scalars(amplitude, m_levels_);
  FilterDesign d = *this;
  d.amplitude_ = amplitude;
  return d;
}

// ---------------------------------------------------------------- responses

cplx shaping_response(const FilterDesign& design, double omega) {
  const CVector& g = design.coeffs();
  cplx acc(1.0, 0.0);
  for (Eigen::Index l = 0; l < g.size(); ++l) {
    acc += g[l] * std::polar(1.0, -static_cast<double>(l + 1) * omega);
  }
  return acc;
}

cplx shaping_response_2d(const FilterDesign& design, double omega1, double omega2) {
  const CMatrix& g = design.coeffs_2d();
  cplx acc(1.0, 0.0);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (i == 0 && j == 0) continue;
      acc += g(i, j) * std::polar(1.0, -(static_cast<double>(i) * omega1 +
                                         static_cast<double>(j) * omega2));
    }
  }
  return acc;
}

// --------------------------------------------------------------- modulation

namespace {

kernels::Taps taps_of(const FilterDesign& design) {
  kernels::Taps t;
  if (!design.is_2d()) {
    const CVector& g = design.coeffs();
    t.rows = static_cast<std::size_t>(g.size());
    t.cols = 1;
    for (Eigen::Index l = 0; l < g.size(); ++l) {
      t.re.push_back(g[l].real());
      t.im.push_back(g[l].imag());
    }
  } else {
    const CMatrix& g = design.coeffs_2d();
    t.rows = static_cast<std::size_t>(g.rows());
    t.cols = static_cast<std::size_t>(g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        t.re.push_back(g(i, j).real());
        t.im.push_back(g(i, j).imag());
      }
    }
  }
  return t;
}

template <typename Seq>
void check_finite(const Seq& seq) {
  for (const cplx& z : seq) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw DomainError("modulator input must be finite");
    }
  }
}

ModulationResult collect(const kernels::BatchResult& r, std::size_t rows, std::size_t cols) {
  ModulationResult m;
  const std::size_t n = rows * cols;
  m.rows = rows;
  m.cols = cols;
  m.output.resize(static_cast<Eigen::Index>(n));
  m.errors.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    m.output[static_cast<Eigen::Index>(k)] = {r.out_re[k], r.out_im[k]};
    m.errors[static_cast<Eigen::Index>(k)] = {r.err_re[k], r.err_im[k]};
  }
  m.overload_count = r.overloads[0];
  m.max_error_iq = r.max_error[0];
  return m;
}

}  // namespace

kernels::Taps design_taps(const FilterDesign& design) { return taps_of(design); }

ModulationResult modulate_1d(std::span<const cplx> input, const FilterDesign& design) {
  if (design.is_2d()) throw ShapeError("modulate_1d called with a 2D design");
  if (input.empty()) throw DomainError("modulator input must be non-empty");
  check_finite(input);
  std::vector<double> re(input.size()), im(input.size());
  for (std::size_t k = 0; k < input.size(); ++k) {
    re[k] = input[k].real();
    im[k] = input[k].imag();
  }
  kernels::BatchResult r;
  kernels::modulate_batch_1d({re, im}, input.size(), 1, taps_of(design), design.m_levels(), r);
  return collect(r, input.size(), 1);
}

ModulationResult modulate_2d(const CMatrix& input, const FilterDesign& design) {
  if (!design.is_2d()) throw ShapeError("modulate_2d called with a 1D design");
  if (input.size() == 0) throw ShapeError("modulator input must be non-empty");
  const auto n1 = static_cast<std::size_t>(input.rows());
  const auto n2 = static_cast<std::size_t>(input.cols());
  std::vector<double> re(n1 * n2), im(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const cplx z = input(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("modulator input must be finite");
      }
      re[i * n2 + j] = z.real();
      im[i * n2 + j] = z.imag();
    }
  }
  kernels::BatchResult r;
  kernels::modulate_batch_2d({re, im}, n1, n2, 1, taps_of(design), design.m_levels(), r);
  return collect(r, n1, n2);
}

// ------------------------------------------------------- noise-power oracle

std::vector<NoisePowerEstimate> measure_noise_power(const FilterDesign& design,
                                                    std::span<const double> omegas,
                                                    std::size_t n_antennas, std::size_t n_trials,
                                                    std::uint64_t seed, unsigned threads) {
  if (design.is_2d()) throw ShapeError("noise-power measurement supports 1D designs");
  if (n_trials == 0) throw DomainError("noise-power measurement needs at least one trial");
  if (n_antennas == 0) throw DomainError("noise-power measurement needs at least one antenna");

  const kernels::Taps taps = taps_of(design);
  const double amp = design.amplitude();
  const std::size_t n_omega = omegas.size();

  // Phasor table e^{-j n omega}, [omega][n].
  std::vector<cplx> phasors(n_omega * n_antennas);
  for (std::size_t w = 0; w < n_omega; ++w) {
    for (std::size_t n = 0; n < n_antennas; ++n) {
      phasors[w * n_antennas + n] = std::polar(1.0, -static_cast<double>(n) * omegas[w]);
    }
  }

  constexpr std::size_t kChunk = 32;
  const std::size_t n_chunks = (n_trials + kChunk - 1) / kChunk;
  std::vector<double> power(n_trials * n_omega, 0.0);
  std::vector<std::uint32_t> overloads(n_trials, 0);

  parallel_for(n_chunks, threads, [&](std::size_t chunk) {
    const std::size_t first = chunk * kChunk;
    const std::size_t batch = std::min(kChunk, n_trials - first);
    std::vector<double> re(n_antennas * batch), im(n_antennas * batch);
    for (std::size_t b = 0; b < batch; ++b) {
      Rng rng = substream(seed, first + b);
      std::uniform_real_distribution<double> uni(-amp, amp);
      for (std::size_t n = 0; n < n_antennas; ++n) {
        re[n * batch + b] = uni(rng);
        im[n * batch + b] = uni(rng);
      }
    }
    kernels::BatchResult r;
    kernels::modulate_batch_1d({re, im}, n_antennas, batch, taps, design.m_levels(), r);
    for (std::size_t b = 0; b < batch; ++b) {
      overloads[first + b] = r.overloads[b];
      for (std::size_t w = 0; w < n_omega; ++w) {
        cplx v(0.0, 0.0);
        for (std::size_t n = 0; n < n_antennas; ++n) {
          const std::size_t idx = n * batch + b;
          v += cplx(r.out_re[idx] - re[idx], r.out_im[idx] - im[idx]) * phasors[w * n_antennas + n];
        }
        power[(first + b) * n_omega + w] = std::norm(v);
      }
    }
  });

  std::size_t total_overloads = 0;
  for (auto o : overloads) total_overloads += o;

  std::vector<NoisePowerEstimate> out(n_omega);
  for (std::size_t w = 0; w < n_omega; ++w) {
    double sum = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) sum += power[t * n_omega + w];
    out[w].empirical = sum / static_cast<double>(n_trials);
    out[w].predicted = std::norm(shaping_response(design, omegas[w])) * 2.0 *
                       static_cast<double>(n_antennas) / 3.0;
    out[w].trials = n_trials;
    out[w].overload_events = total_overloads;
  }
  return out;
}

NoisePowerEstimate measure_noise_power(const FilterDesign& design, double omega,
                                       std::size_t n_antennas, std::size_t n_trials,
                                       std::uint64_t seed, unsigned threads) {
  const double w[1] = {omega};
  return measure_noise_power(design, std::span<const double>(w, 1), n_antennas, n_trials, seed,
                             threads)[0];
}

}  // namespace sdsm
