// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sdsm/errors.hpp"
#include "sdsm/kernels/modulate.hpp"

namespace sdsm::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SDSM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("SDSM_FORCE_SCALAR"); env != nullptr && env[0] != '\0' &&
                                                          std::string(env) != "0") {
    return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void prepare(BatchResult& out, std::size_t total, std::size_t batch) {
  out.out_re.assign(total, 0.0);
  out.out_im.assign(total, 0.0);
  out.err_re.assign(total, 0.0);
  out.err_im.assign(total, 0.0);
  out.overloads.assign(batch, 0);
  out.max_error.assign(batch, 0.0);
}

void check_common(Isa isa, int m_levels) {
  if (m_levels < 2) throw DomainError("quantizer needs M >= 2 levels");
  if (!isa_available(isa)) {
    throw std::runtime_error("kernel variant " + std::string(isa_name(isa)) + " unavailable");
  }
}

void check_input(SplitBatch input, std::size_t total) {
  if (input.re.size() != total || input.im.size() != total) {
    throw ShapeError("batch input size does not match antenna count x batch size");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2()); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::runtime_error("kernel variant " + std::string(isa_name(isa)) + " unavailable");
  }
  current().store(isa, std::memory_order_relaxed);
}

void modulate_batch_1d(Isa isa, SplitBatch input, std::size_t n, std::size_t batch,
                       const Taps& taps, int m_levels, BatchResult& out) {
  check_common(isa, m_levels);
  const std::size_t total = n * batch;
  check_input(input, total);
  if (taps.cols != 1 || taps.re.size() != taps.rows || taps.im.size() != taps.rows) {
    throw ShapeError("1D kernel needs a single column of taps");
  }
  prepare(out, total, batch);
  std::size_t done = 0;
#if defined(SDSM_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    detail::modulate_1d_avx2(input, n, batch, taps, m_levels, out);
    done = batch - batch % 4;
  }
#else
  (void)isa;
#endif
  detail::modulate_1d_scalar(input, n, batch, done, batch, taps, m_levels, out);
}

void modulate_batch_2d(Isa isa, SplitBatch input, std::size_t n1, std::size_t n2,
                       std::size_t batch, const Taps& taps, int m_levels, BatchResult& out) {
  check_common(isa, m_levels);
  const std::size_t total = n1 * n2 * batch;
  check_input(input, total);
  if (taps.rows == 0 || taps.cols == 0 || taps.re.size() != taps.rows * taps.cols ||
      taps.im.size() != taps.rows * taps.cols) {
    throw ShapeError("2D kernel taps do not match their declared shape");
  }
  prepare(out, total, batch);
  std::size_t done = 0;
#if defined(SDSM_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    detail::modulate_2d_avx2(input, n1, n2, batch, taps, m_levels, out);
    done = batch - batch % 4;
  }
#else
  (void)isa;
#endif
  detail::modulate_2d_scalar(input, n1, n2, batch, done, batch, taps, m_levels, out);
}

}  // namespace sdsm::kernels
