// SPDX-License-Identifier: Apache-2.0
//
// AVX2 variants: four sequences per __m256d, one per lane. Compiled with
// -mavx2 only (no FMA) so products and sums round exactly as the scalar
// reference does.

#include <immintrin.h>

#include <algorithm>

#include "sdsm/kernels/modulate.hpp"
#include "sdsm/quantizer.hpp"

namespace sdsm::kernels::detail {

namespace {

constexpr std::size_t kLanes = 4;

struct Quantizer {
  __m256d half = _mm256_set1_pd(0.5);
  __m256d two = _mm256_set1_pd(2.0);
  __m256d one = _mm256_set1_pd(1.0);
  __m256d top;
  __m256d neg_top;
  bool even;

  explicit Quantizer(int m_levels)
      : top(_mm256_set1_pd(static_cast<double>(m_levels - 1))),
        neg_top(_mm256_set1_pd(-static_cast<double>(m_levels - 1))),
        even(m_levels % 2 == 0) {}

  __m256d operator()(__m256d y) const {
    __m256d v;
    if (even) {
      v = _mm256_add_pd(_mm256_mul_pd(_mm256_floor_pd(_mm256_mul_pd(y, half)), two), one);
    } else {
      v = _mm256_mul_pd(_mm256_floor_pd(_mm256_mul_pd(_mm256_add_pd(y, one), half)), two);
    }
    return _mm256_min_pd(_mm256_max_pd(v, neg_top), top);
  }
};

struct ErrorTracker {
  __m256d sign = _mm256_set1_pd(-0.0);
  __m256d limit = _mm256_set1_pd(1.0 + kOverloadTolerance);
  __m256d one = _mm256_set1_pd(1.0);
  __m256d max_err = _mm256_setzero_pd();
  __m256d count = _mm256_setzero_pd();

  void add(__m256d q_re, __m256d q_im) {
    const __m256d e = _mm256_max_pd(_mm256_andnot_pd(sign, q_re), _mm256_andnot_pd(sign, q_im));
    max_err = _mm256_max_pd(max_err, e);
    count = _mm256_add_pd(count, _mm256_and_pd(_mm256_cmp_pd(e, limit, _CMP_GT_OQ), one));
  }

  void store(BatchResult& out, std::size_t b) const {
    alignas(32) double c[kLanes];
    _mm256_store_pd(c, count);
    _mm256_storeu_pd(out.max_error.data() + b, max_err);
    for (std::size_t i = 0; i < kLanes; ++i) out.overloads[b + i] = static_cast<std::uint32_t>(c[i]);
  }
};

// acc += g * q with the reference expression tree.
inline void complex_mac(__m256d& acc_re, __m256d& acc_im, __m256d gr, __m256d gi, __m256d qr,
                        __m256d qi) {
  acc_re = _mm256_add_pd(acc_re, _mm256_sub_pd(_mm256_mul_pd(gr, qr), _mm256_mul_pd(gi, qi)));
  acc_im = _mm256_add_pd(acc_im, _mm256_add_pd(_mm256_mul_pd(gr, qi), _mm256_mul_pd(gi, qr)));
}

inline void finish_step(const Quantizer& quant, ErrorTracker& track, SplitBatch input,
                        BatchResult& out, std::size_t idx, __m256d fb_re, __m256d fb_im) {
  const __m256d b_re = _mm256_add_pd(_mm256_loadu_pd(input.re.data() + idx), fb_re);
  const __m256d b_im = _mm256_add_pd(_mm256_loadu_pd(input.im.data() + idx), fb_im);
  const __m256d x_re = quant(b_re);
  const __m256d x_im = quant(b_im);
  const __m256d q_re = _mm256_sub_pd(x_re, b_re);
  const __m256d q_im = _mm256_sub_pd(x_im, b_im);
  _mm256_storeu_pd(out.out_re.data() + idx, x_re);
  _mm256_storeu_pd(out.out_im.data() + idx, x_im);
  _mm256_storeu_pd(out.err_re.data() + idx, q_re);
  _mm256_storeu_pd(out.err_im.data() + idx, q_im);
  track.add(q_re, q_im);
}

}  // namespace

void modulate_1d_avx2(SplitBatch input, std::size_t n, std::size_t batch, const Taps& taps,
                      int m_levels, BatchResult& out) {
  const Quantizer quant(m_levels);
  const std::size_t order = taps.rows;
  const std::size_t vec_end = batch - batch % kLanes;
  for (std::size_t b = 0; b < vec_end; b += kLanes) {
    ErrorTracker track;
    for (std::size_t k = 0; k < n; ++k) {
      __m256d fb_re = _mm256_setzero_pd();
      __m256d fb_im = _mm256_setzero_pd();
      const std::size_t reach = std::min(order, k);
      for (std::size_t l = 1; l <= reach; ++l) {
        const std::size_t src = (k - l) * batch + b;
        complex_mac(fb_re, fb_im, _mm256_set1_pd(taps.re[l - 1]), _mm256_set1_pd(taps.im[l - 1]),
                    _mm256_loadu_pd(out.err_re.data() + src),
                    _mm256_loadu_pd(out.err_im.data() + src));
      }
      finish_step(quant, track, input, out, k * batch + b, fb_re, fb_im);
    }
    track.store(out, b);
  }
}

void modulate_2d_avx2(SplitBatch input, std::size_t n1, std::size_t n2, std::size_t batch,
                      const Taps& taps, int m_levels, BatchResult& out) {
  const Quantizer quant(m_levels);
  const std::size_t l1_max = taps.rows - 1;
  const std::size_t l2_max = taps.cols - 1;
  const std::size_t vec_end = batch - batch % kLanes;
  for (std::size_t b = 0; b < vec_end; b += kLanes) {
    ErrorTracker track;
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        __m256d fb_re = _mm256_setzero_pd();
        __m256d fb_im = _mm256_setzero_pd();
        for (std::size_t l1 = 0; l1 <= std::min(l1_max, i); ++l1) {
          for (std::size_t l2 = 0; l2 <= std::min(l2_max, j); ++l2) {
            if (l1 == 0 && l2 == 0) continue;
            const std::size_t tap = l1 * taps.cols + l2;
            const std::size_t src = ((i - l1) * n2 + (j - l2)) * batch + b;
            complex_mac(fb_re, fb_im, _mm256_set1_pd(taps.re[tap]), _mm256_set1_pd(taps.im[tap]),
                        _mm256_loadu_pd(out.err_re.data() + src),
                        _mm256_loadu_pd(out.err_im.data() + src));
          }
        }
        finish_step(quant, track, input, out, (i * n2 + j) * batch + b, fb_re, fb_im);
      }
    }
    track.store(out, b);
  }
}

}  // namespace sdsm::kernels::detail
