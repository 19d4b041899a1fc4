// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference kernels. The operation order here is the contract the
// vector variants reproduce: taps accumulate in ascending (l1, l2) order and
// every complex product is formed as (ar*br - ai*bi, ar*bi + ai*br).

#include <algorithm>
#include <cmath>

#include "sdsm/kernels/modulate.hpp"
#include "sdsm/quantizer.hpp"

namespace sdsm::kernels::detail {

namespace {

struct StepOut {
  double x_re, x_im, q_re, q_im;
};

inline StepOut quantize_step(double b_re, double b_im, int m_levels) {
  const double x_re = quantize_level(b_re, m_levels);
  const double x_im = quantize_level(b_im, m_levels);
  return {x_re, x_im, x_re - b_re, x_im - b_im};
}

}  // namespace

void modulate_1d_scalar(SplitBatch input, std::size_t n, std::size_t batch,
                        std::size_t lane_begin, std::size_t lane_end, const Taps& taps,
                        int m_levels, BatchResult& out) {
  const std::size_t order = taps.rows;
  for (std::size_t b = lane_begin; b < lane_end; ++b) {
    std::uint32_t overloads = 0;
    double max_err = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double fb_re = 0.0;
      double fb_im = 0.0;
      const std::size_t reach = std::min(order, k);
      for (std::size_t l = 1; l <= reach; ++l) {
        const double gr = taps.re[l - 1];
        const double gi = taps.im[l - 1];
        const double qr = out.err_re[(k - l) * batch + b];
        const double qi = out.err_im[(k - l) * batch + b];
        fb_re = fb_re + (gr * qr - gi * qi);
        fb_im = fb_im + (gr * qi + gi * qr);
      }
      const std::size_t idx = k * batch + b;
      const StepOut s = quantize_step(input.re[idx] + fb_re, input.im[idx] + fb_im, m_levels);
      out.out_re[idx] = s.x_re;
      out.out_im[idx] = s.x_im;
      out.err_re[idx] = s.q_re;
      out.err_im[idx] = s.q_im;
      const double e = std::max(std::abs(s.q_re), std::abs(s.q_im));
      max_err = std::max(max_err, e);
      if (e > 1.0 + kOverloadTolerance) ++overloads;
    }
    out.overloads[b] = overloads;
    out.max_error[b] = max_err;
  }
}

void modulate_2d_scalar(SplitBatch input, std::size_t n1, std::size_t n2, std::size_t batch,
                        std::size_t lane_begin, std::size_t lane_end, const Taps& taps,
                        int m_levels, BatchResult& out) {
  const std::size_t l1_max = taps.rows - 1;
  const std::size_t l2_max = taps.cols - 1;
  for (std::size_t b = lane_begin; b < lane_end; ++b) {
    std::uint32_t overloads = 0;
    double max_err = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        double fb_re = 0.0;
        double fb_im = 0.0;
        for (std::size_t l1 = 0; l1 <= std::min(l1_max, i); ++l1) {
          for (std::size_t l2 = 0; l2 <= std::min(l2_max, j); ++l2) {
            if (l1 == 0 && l2 == 0) continue;
            const double gr = taps.re[l1 * taps.cols + l2];
            const double gi = taps.im[l1 * taps.cols + l2];
            const std::size_t src = ((i - l1) * n2 + (j - l2)) * batch + b;
            const double qr = out.err_re[src];
            const double qi = out.err_im[src];
            fb_re = fb_re + (gr * qr - gi * qi);
            fb_im = fb_im + (gr * qi + gi * qr);
          }
        }
        const std::size_t idx = (i * n2 + j) * batch + b;
        const StepOut s = quantize_step(input.re[idx] + fb_re, input.im[idx] + fb_im, m_levels);
        out.out_re[idx] = s.x_re;
        out.out_im[idx] = s.x_im;
        out.err_re[idx] = s.q_re;
        out.err_im[idx] = s.q_im;
        const double e = std::max(std::abs(s.q_re), std::abs(s.q_im));
        max_err = std::max(max_err, e);
        if (e > 1.0 + kOverloadTolerance) ++overloads;
      }
    }
    out.overloads[b] = overloads;
    out.max_error[b] = max_err;
  }
}

}  // namespace sdsm::kernels::detail
