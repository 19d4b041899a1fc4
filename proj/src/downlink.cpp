// SPDX-License-Identifier: Apache-2.0

#include "sdsm/downlink.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "sdsm/errors.hpp"
#include "sdsm/filter_designs.hpp"
#include "sdsm/iq_norms.hpp"
#include "sdsm/parallel.hpp"
#include "sdsm/qam.hpp"
#include "sdsm/quantizer.hpp"

namespace sdsm {

namespace {

constexpr double kLoadingFloor = 1e-12;
constexpr double kNoiseVar = 1.0;

// Substream tags.
constexpr std::uint32_t kTagUsers = 0x100;
constexpr std::uint32_t kTagBits = 0x200;
constexpr std::uint32_t kTagNoise = 0x10000;

struct SchemeInfo {
  Scheme scheme;
  std::string_view name;
};

constexpr SchemeInfo kSchemes[] = {
    {Scheme::SdFixedSector, "sd-fs"}, {Scheme::SdUserTargeted, "sd-ut"},
    {Scheme::SdFirstOrder, "sd-1st"}, {Scheme::SdSecondOrder, "sd-2nd"},
    {Scheme::Direct, "direct"},       {Scheme::Unquantized, "unquant"},
};

bool angle_in_open_range(double a) { return std::isfinite(a) && a > -kPi / 2 && a < kPi / 2; }

double rho_from_snr(double snr_db, int m_levels) {
  const double m1 = static_cast<double>(m_levels - 1);
  return std::pow(10.0, snr_db / 10.0) * kNoiseVar / (m1 * m1);
}

double max_abs_component(const CMatrix& m) {
  double c = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) c = std::max(c, iq_norm_inf(m(i, j)));
  }
  return c;
}

double peak_or_throw(const CMatrix& p) {
  const double c = max_abs_component(p);
  if (!(c > 0.0)) throw DomainError("precoded block is identically zero; cannot normalize");
  return c;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  for (const auto& i : kSchemes) {
    if (i.scheme == s) return i.name;
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (const auto& i : kSchemes) {
    if (i.name == name) return i.scheme;
  }
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected sd-fs, sd-ut, sd-1st, sd-2nd, direct or unquant)");
}

bool is_sigma_delta(Scheme s) {
  return s == Scheme::SdFixedSector || s == Scheme::SdUserTargeted || s == Scheme::SdFirstOrder ||
         s == Scheme::SdSecondOrder;
}

void ScenarioConfig::validate() const {
  try {
    if (two_d) {
      upa.validate();
    } else {
      ula.validate();
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (n_users == 0) throw ConfigError("need at least one user");
  if (n_users > n_antennas()) throw ConfigError("ZF precoding needs K <= N");
  if (symbols == 0) throw ConfigError("need at least one symbol per trial");
  if (trials == 0) throw ConfigError("need at least one trial");
  if (m_levels < 2) throw ConfigError("M must be >= 2");
  if (schemes.empty()) throw ConfigError("no schemes selected");
  if (snr_db.empty()) throw ConfigError("SNR grid is empty");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw ConfigError("SNR values must be finite");
  }
  if (!angle_in_open_range(theta_range.first) || !angle_in_open_range(theta_range.second) ||
      theta_range.first > theta_range.second) {
    throw ConfigError("azimuth sector must be an ordered interval inside (-90, 90) degrees");
  }
  if (two_d && (!angle_in_open_range(phi_range.first) || !angle_in_open_range(phi_range.second) ||
                phi_range.first > phi_range.second)) {
    throw ConfigError("elevation sector must be an ordered interval inside (-90, 90) degrees");
  }
  if (!(min_separation >= 0.0)) throw ConfigError("minimum separation must be non-negative");
  if (!(r0 > 0.0 && r1_min > 0.0 && r1_min <= r1_max)) {
    throw ConfigError("gain model needs r0 > 0 and 0 < r1_min <= r1_max");
  }
  // Pigeonhole: how many separated positions fit into the sector.
  const auto slots = [&](std::pair<double, double> r) {
    if (min_separation == 0.0) return static_cast<double>(n_users);
    return std::floor((r.second - r.first) / min_separation + 1e-9) + 1.0;
  };
  const double capacity = two_d ? slots(theta_range) * slots(phi_range) : slots(theta_range);
  if (capacity < static_cast<double>(n_users)) {
    throw ConfigError("sector too narrow for " + std::to_string(n_users) +
                      " users at the minimum angular separation");
  }
  if (!(design_tol > 0.0)) throw ConfigError("design tolerance must be positive");
  if (two_d ? (order_1 + order_2 == 0) : order == 0) throw ConfigError("design order must be >= 1");
  for (Scheme s : schemes) {
    if (s == Scheme::SdSecondOrder) {
      if (two_d) throw ConfigError("sd-2nd has no 2D counterpart");
      if (m_levels < 4) {
        throw ConfigError("sd-2nd requires M >= 4 (its amplitude bound is A <= M-3, got M=" +
                          std::to_string(m_levels) + ")");
      }
    }
    if (s == Scheme::SdFirstOrder && two_d && m_levels < 4) {
      throw ConfigError("2D sd-1st requires M >= 4 (its amplitude bound is A <= M-3, got M=" +
                        std::to_string(m_levels) + ")");
    }
  }
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (schemes[i] == schemes[j]) throw ConfigError("scheme listed twice");
    }
  }
}

std::vector<UserChannel> generate_users(const ScenarioConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> theta(cfg.theta_range.first, cfg.theta_range.second);
  std::uniform_real_distribution<double> phi(cfg.phi_range.first, cfg.phi_range.second);
  std::uniform_real_distribution<double> r1(cfg.r1_min, cfg.r1_max);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  constexpr std::size_t kMaxDraws = 1000000;

  std::vector<UserChannel> users;
  std::size_t draws = 0;
  while (users.size() < cfg.n_users) {
    if (++draws > kMaxDraws) throw ConfigError("could not place users at the requested separation");
    UserChannel u;
    u.azimuth = theta(rng);
    if (cfg.two_d) u.elevation = phi(rng);
    const bool separated = std::all_of(users.begin(), users.end(), [&](const UserChannel& v) {
      const bool az = std::abs(u.azimuth - v.azimuth) >= cfg.min_separation;
      const bool el = cfg.two_d && std::abs(u.elevation - v.elevation) >= cfg.min_separation;
      return az || el;
    });
    if (separated) users.push_back(u);
  }
  for (auto& u : users) {
    const double mag = cfg.r0 / r1(rng);
    u.gain = std::polar(mag, phase(rng));
  }
  return users;
}

std::vector<std::pair<double, double>> user_frequencies(const ScenarioConfig& cfg,
                                                        std::span<const UserChannel> users) {
  std::vector<std::pair<double, double>> w;
  for (const auto& u : users) {
    if (cfg.two_d) {
      w.push_back(spatial_frequency_2d(u.azimuth, u.elevation, cfg.upa));
    } else {
      w.emplace_back(spatial_frequency(u.azimuth, cfg.ula.spacing_ratio), 0.0);
    }
  }
  return w;
}

RVector noise_loading(const FilterDesign& design, std::span<const UserChannel> users,
                      std::span<const std::pair<double, double>> omegas, const SqnrContext& ctx) {
  ctx.validate();
  if (users.size() != omegas.size()) throw ShapeError("users and frequencies differ in length");
  if (!(design.amplitude() > 0.0)) throw DomainError("noise loading needs A > 0");
  RVector d(static_cast<Eigen::Index>(users.size()));
  const double n = static_cast<double>(ctx.n_effective);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const cplx r = design.is_2d() ? shaping_response_2d(design, omegas[i].first, omegas[i].second)
                                  : shaping_response(design, omegas[i].first);
    const double v = ctx.rho * std::norm(users[i].gain) * (2.0 * n / 3.0) * std::norm(r) + ctx.noise_var;
    d[static_cast<Eigen::Index>(i)] = std::max(std::sqrt(v), kLoadingFloor);
  }
  return d;
}

CMatrix zf_pseudo_inverse(const CMatrix& h) {
  if (h.rows() == 0 || h.rows() > h.cols()) throw ShapeError("ZF needs 1 <= K <= N");
  const CMatrix gram = h * h.adjoint();
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13)) {
    throw NumericalError("channel Gram matrix is singular; ZF undefined");
  }
  return h.adjoint() * llt.solve(CMatrix::Identity(h.rows(), h.rows()));
}

TransmitBlock sd_transmit(const CMatrix& h_pinv, const RVector& loading, const CMatrix& symbols,
                          const FilterDesign& design, const UpaGeometry* upa) {
  if (loading.size() != symbols.rows() || h_pinv.cols() != symbols.rows()) {
    throw ShapeError("precoder, loading and symbol block sizes disagree");
  }
  if (design.is_2d() && (upa == nullptr || upa->n_antennas() != static_cast<std::size_t>(h_pinv.rows()))) {
    throw ShapeError("2D design needs the UPA shape of the precoder");
  }
  const CMatrix p = h_pinv * loading.cast<cplx>().asDiagonal() * symbols;
  const double c = peak_or_throw(p);
  const double scale = design.amplitude() / c;
  const auto n = static_cast<std::size_t>(p.rows());
  const auto t_count = static_cast<std::size_t>(p.cols());

  std::vector<double> re(n * t_count), im(n * t_count);
  TransmitBlock tx;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < t_count; ++t) {
      const cplx v = scale * p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
      re[k * t_count + t] = v.real();
      im[k * t_count + t] = v.imag();
      tx.peak_input = std::max(tx.peak_input, iq_norm_inf(v));
    }
  }
  kernels::BatchResult out;
  const kernels::Taps taps = design_taps(design);
  if (design.is_2d()) {
    kernels::modulate_batch_2d({re, im}, upa->n1, upa->n2, t_count, taps, design.m_levels(), out);
  } else {
    kernels::modulate_batch_1d({re, im}, n, t_count, taps, design.m_levels(), out);
  }
  tx.x.resize(p.rows(), p.cols());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < t_count; ++t) {
      tx.x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = {out.out_re[k * t_count + t],
                                                                          out.out_im[k * t_count + t]};
    }
  }
  for (auto o : out.overloads) tx.overloads += o;
  tx.gains = scale * loading;
  return tx;
}

TransmitBlock direct_quant_transmit(const CMatrix& h_pinv, const CMatrix& symbols, int m_levels) {
  const SignalSet q(m_levels);
  const CMatrix p = h_pinv * symbols;
  const double scale = static_cast<double>(m_levels) / peak_or_throw(p);
  TransmitBlock tx;
  tx.x = p.unaryExpr([&](const cplx& v) { return q.quantize(scale * v); });
  tx.gains = RVector::Constant(symbols.rows(), scale);
  return tx;
}

TransmitBlock unquantized_transmit(const CMatrix& h_pinv, const CMatrix& symbols, int m_levels) {
  if (m_levels < 2) throw DomainError("M must be >= 2");
  const CMatrix p = h_pinv * symbols;
  const double scale = static_cast<double>(m_levels - 1) / peak_or_throw(p);
  TransmitBlock tx;
  tx.x = scale * p;
  tx.gains = RVector::Constant(symbols.rows(), scale);
  return tx;
}

std::vector<std::uint8_t> receive_and_detect(const CMatrix& h, const TransmitBlock& tx, double rho,
                                             const CMatrix& noise) {
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (h.cols() != tx.x.rows() || noise.rows() != h.rows() || noise.cols() != tx.x.cols() ||
      tx.gains.size() != h.rows()) {
    throw ShapeError("receiver block sizes disagree");
  }
  const double sr = std::sqrt(rho);
  const CMatrix y = sr * (h * tx.x) + noise;
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double g = sr * tx.gains[i];
    if (!(g > 0.0) || !std::isfinite(g)) throw NumericalError("zero effective receive gain");
    for (Eigen::Index t = 0; t < y.cols(); ++t) {
      labels[static_cast<std::size_t>(i * y.cols() + t)] = qam64_demod(y(i, t) / g);
    }
  }
  return labels;
}

const BerPoint& BerReport::at(Scheme s, double snr_db) const {
  for (const auto& p : points) {
    if (p.scheme == s && p.snr_db == snr_db) return p;
  }
  throw DomainError("no BER point for " + std::string(scheme_name(s)) + " at " + std::to_string(snr_db) + " dB");
}

std::string BerReport::to_csv() const {
  std::ostringstream os;
  os << "scheme,snr_db,ber,bit_errors,bits,overloads\n";
  char buf[160];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%s,%.6g,%.9e,%llu,%llu,%llu\n", std::string(scheme_name(p.scheme)).c_str(),
                  p.snr_db, p.ber(), static_cast<unsigned long long>(p.bit_errors),
                  static_cast<unsigned long long>(p.bits), static_cast<unsigned long long>(p.overloads));
    os << buf;
  }
  return os.str();
}

FilterDesign run_level_design(const ScenarioConfig& cfg, Scheme s) {
  switch (s) {
    case Scheme::SdFirstOrder:
      return cfg.two_d ? first_order_2d(cfg.m_levels) : first_order(cfg.m_levels);
    case Scheme::SdSecondOrder:
      if (cfg.two_d) throw ConfigError("sd-2nd has no 2D counterpart");
      return second_order(cfg.m_levels);
    case Scheme::SdFixedSector: {
      // Designed once per run without background noise, so the result does not
      // depend on the SNR point.
      DesignSpec spec;
      spec.mode = DesignMode::FixedSector;
      spec.two_d = cfg.two_d;
      spec.m_levels = cfg.m_levels;
      spec.ula = cfg.ula;
      spec.upa = cfg.upa;
      spec.order_1 = cfg.two_d ? cfg.order_1 : cfg.order;
      spec.order_2 = cfg.two_d ? cfg.order_2 : 0;
      spec.ctx = {1.0, 0.0, cfg.n_antennas()};
      spec.theta_range = cfg.theta_range;
      spec.phi_range = cfg.phi_range;
      spec.r_min = cfg.r0 / cfg.r1_max;
      spec.r_max = cfg.r0 / cfg.r1_min;
      spec.samples = cfg.design_samples;
      spec.grid_theta = cfg.grid_theta;
      spec.grid_phi = cfg.grid_phi;
      spec.tol = cfg.design_tol;
      return design(spec).design;
    }
    default:
      throw DomainError("scheme " + std::string(scheme_name(s)) + " has no run-level design");
  }
}

namespace {

struct TrialCounts {
  std::vector<std::uint64_t> errors;     // [scheme][snr]
  std::vector<std::uint64_t> overloads;  // [scheme][snr]
  std::size_t redraws = 0;
  std::size_t floors = 0;
};

FilterDesign user_targeted_design(const ScenarioConfig& cfg, std::span<const UserChannel> users,
                                  double rho) {
  DesignSpec spec;
  spec.mode = DesignMode::UserTargeted;
  spec.two_d = cfg.two_d;
  spec.m_levels = cfg.m_levels;
  spec.ula = cfg.ula;
  spec.upa = cfg.upa;
  spec.order_1 = cfg.two_d ? cfg.order_1 : cfg.order;
  spec.order_2 = cfg.two_d ? cfg.order_2 : 0;
  spec.ctx = {rho, kNoiseVar, cfg.n_antennas()};
  spec.users.assign(users.begin(), users.end());
  spec.tol = cfg.design_tol;
  return design(spec).design;
}

CMatrix draw_noise(Rng& rng, Eigen::Index k, Eigen::Index t) {
  std::normal_distribution<double> nd(0.0, std::sqrt(kNoiseVar / 2.0));
  CMatrix n(k, t);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      n(i, j) = {re, im};
    }
  }
  return n;
}

}  // namespace

BerReport run_ber(const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::size_t n_schemes = cfg.schemes.size();
  const std::size_t n_snr = cfg.snr_db.size();
  const auto k = static_cast<Eigen::Index>(cfg.n_users);
  const auto t_count = static_cast<Eigen::Index>(cfg.symbols);
  const UpaGeometry* upa = cfg.two_d ? &cfg.upa : nullptr;
  std::vector<double> rhos;
  for (double s : cfg.snr_db) rhos.push_back(rho_from_snr(s, cfg.m_levels));

  std::vector<std::optional<FilterDesign>> fixed(n_schemes);
  for (std::size_t s = 0; s < n_schemes; ++s) {
    const Scheme sc = cfg.schemes[s];
    if (is_sigma_delta(sc) && sc != Scheme::SdUserTargeted) fixed[s] = run_level_design(cfg, sc);
  }
  const bool needs_ut = std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::SdUserTargeted) !=
                        cfg.schemes.end();

  std::vector<TrialCounts> per_trial(cfg.trials);
  parallel_for(cfg.trials, threads, [&](std::size_t trial) {
    TrialCounts& out = per_trial[trial];
    out.errors.assign(n_schemes * n_snr, 0);
    out.overloads.assign(n_schemes * n_snr, 0);

    std::vector<UserChannel> users;
    CMatrix h, h_pinv;
    std::vector<FilterDesign> ut_designs;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt > cfg.max_redraws) {
        throw NumericalError("trial " + std::to_string(trial) + " failed after " +
                             std::to_string(cfg.max_redraws) + " user redraws");
      }
      Rng rng = substream(cfg.seed, trial, kTagUsers + static_cast<std::uint32_t>(attempt));
      users = generate_users(cfg, rng);
      try {
        h = cfg.two_d ? channel_matrix(users, cfg.upa) : channel_matrix(users, cfg.ula);
        h_pinv = zf_pseudo_inverse(h);
        ut_designs.clear();
        if (needs_ut) {
          for (double rho : rhos) ut_designs.push_back(user_targeted_design(cfg, users, rho));
        }
        break;
      } catch (const NumericalError&) {
        ++out.redraws;
      }
    }
    const auto omegas = user_frequencies(cfg, users);

    Rng bit_rng = substream(cfg.seed, trial, kTagBits);
    std::vector<std::uint8_t> sent(static_cast<std::size_t>(k * t_count));
    CMatrix symbols(k, t_count);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index t = 0; t < t_count; ++t) {
        const auto b = static_cast<std::uint8_t>(bit_rng() >> 58);
        sent[static_cast<std::size_t>(i * t_count + t)] = b;
        symbols(i, t) = qam64_mod(b);
      }
    }

    std::vector<std::optional<TransmitBlock>> snr_free(n_schemes);
    for (std::size_t s = 0; s < n_schemes; ++s) {
      if (cfg.schemes[s] == Scheme::Direct) snr_free[s] = direct_quant_transmit(h_pinv, symbols, cfg.m_levels);
      if (cfg.schemes[s] == Scheme::Unquantized) snr_free[s] = unquantized_transmit(h_pinv, symbols, cfg.m_levels);
    }

    for (std::size_t j = 0; j < n_snr; ++j) {
      Rng noise_rng = substream(cfg.seed, trial, kTagNoise + static_cast<std::uint32_t>(j));
      const CMatrix noise = draw_noise(noise_rng, k, t_count);
      const SqnrContext ctx{rhos[j], kNoiseVar, cfg.n_antennas()};
      for (std::size_t s = 0; s < n_schemes; ++s) {
        TransmitBlock local;
        const TransmitBlock* tx = nullptr;
        if (snr_free[s]) {
          tx = &*snr_free[s];
        } else {
          const FilterDesign& d = fixed[s] ? *fixed[s] : ut_designs[j];
          const RVector loading = noise_loading(d, users, omegas, ctx);
          out.floors += static_cast<std::size_t>((loading.array() <= kLoadingFloor).count());
          local = sd_transmit(h_pinv, loading, symbols, d, upa);
          tx = &local;
        }
        const auto got = receive_and_detect(h, *tx, rhos[j], noise);
        std::uint64_t errs = 0;
        for (std::size_t b = 0; b < got.size(); ++b) errs += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(got[b] ^ sent[b])));
        out.errors[s * n_snr + j] = errs;
        out.overloads[s * n_snr + j] = tx->overloads;
      }
    }
  });

  BerReport rep;
  rep.seed = cfg.seed;
  rep.trials = cfg.trials;
  const std::uint64_t bits_per_trial = static_cast<std::uint64_t>(cfg.n_users) * cfg.symbols * kQamBits;
  for (std::size_t s = 0; s < n_schemes; ++s) {
    for (std::size_t j = 0; j < n_snr; ++j) {
      BerPoint p;
      p.scheme = cfg.schemes[s];
      p.snr_db = cfg.snr_db[j];
      for (const auto& tc : per_trial) {
        p.bit_errors += tc.errors[s * n_snr + j];
        p.overloads += tc.overloads[s * n_snr + j];
        p.bits += bits_per_trial;
      }
      rep.points.push_back(p);
    }
  }
  for (const auto& tc : per_trial) {
    rep.redraws += tc.redraws;
    rep.loading_floors += tc.floors;
  }
  return rep;
}

}  // namespace sdsm
