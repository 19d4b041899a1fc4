// SPDX-License-Identifier: Apache-2.0
//
// Batched Sigma-Delta kernels. A batch holds B independent input sequences in
// split-complex, antenna-major layout: element (n, b) lives at n * B + b. The
// recursion is sequential in n but independent across b, so vector variants
// put one sequence per lane. Every variant must reproduce the scalar
// reference bit-for-bit.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sdsm::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// True if this build contains the variant and the CPU can run it.
bool isa_available(Isa isa);

/// Best available variant, unless overridden by set_isa() or the
/// SDSM_FORCE_SCALAR environment variable.
Isa active_isa();

/// Pins the variant used by the dispatching entry points. Throws if unavailable.
void set_isa(Isa isa);

/// Feedback taps. 1D: g_1..g_L. 2D: (L1+1) x (L2+1) row-major, tap (0,0) ignored.
struct Taps {
  std::vector<double> re;
  std::vector<double> im;
  std::size_t rows = 0;  ///< L for 1D, L1+1 for 2D
  std::size_t cols = 1;  ///< 1 for 1D, L2+1 for 2D
};

struct SplitBatch {
  std::span<const double> re;
  std::span<const double> im;
};

struct BatchResult {
  std::vector<double> out_re, out_im;
  std::vector<double> err_re, err_im;
  std::vector<std::uint32_t> overloads;  ///< per sequence
  std::vector<double> max_error;         ///< per sequence, IQ-infinity
};

/// 1D modulation of `batch` sequences of length n.
void modulate_batch_1d(Isa isa, SplitBatch input, std::size_t n, std::size_t batch,
                       const Taps& taps, int m_levels, BatchResult& out);

/// 2D modulation of `batch` n1 x n2 inputs; antenna index is n1 * n2_count + n2.
void modulate_batch_2d(Isa isa, SplitBatch input, std::size_t n1, std::size_t n2,
                       std::size_t batch, const Taps& taps, int m_levels, BatchResult& out);

inline void modulate_batch_1d(SplitBatch input, std::size_t n, std::size_t batch,
                              const Taps& taps, int m_levels, BatchResult& out) {
  modulate_batch_1d(active_isa(), input, n, batch, taps, m_levels, out);
}

inline void modulate_batch_2d(SplitBatch input, std::size_t n1, std::size_t n2,
                              std::size_t batch, const Taps& taps, int m_levels,
                              BatchResult& out) {
  modulate_batch_2d(active_isa(), input, n1, n2, batch, taps, m_levels, out);
}

namespace detail {

// Lane range [lane_begin, lane_end) of the batch; out is pre-sized.
void modulate_1d_scalar(SplitBatch input, std::size_t n, std::size_t batch,
                        std::size_t lane_begin, std::size_t lane_end, const Taps& taps,
                        int m_levels, BatchResult& out);
void modulate_2d_scalar(SplitBatch input, std::size_t n1, std::size_t n2, std::size_t batch,
                        std::size_t lane_begin, std::size_t lane_end, const Taps& taps,
                        int m_levels, BatchResult& out);

#if defined(SDSM_HAVE_AVX2)
// Handles lanes [0, batch - batch % 4); callers finish the tail with the scalar kernel.
void modulate_1d_avx2(SplitBatch input, std::size_t n, std::size_t batch, const Taps& taps,
                      int m_levels, BatchResult& out);
void modulate_2d_avx2(SplitBatch input, std::size_t n1, std::size_t n2, std::size_t batch,
                      const Taps& taps, int m_levels, BatchResult& out);
#endif

}  // namespace detail

}  // namespace sdsm::kernels
