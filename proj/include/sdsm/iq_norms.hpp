// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

#include "sdsm/types.hpp"

namespace sdsm {

struct IqNorms {
  double iq1 = 0.0;    ///< sum |Re| + |Im|
  double iqinf = 0.0;  ///< max(|Re|, |Im|)
};

template <typename Derived>
IqNorms iq_norms(const Eigen::MatrixBase<Derived>& x) {
  IqNorms n;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double re = std::abs(x(i, j).real());
      const double im = std::abs(x(i, j).imag());
      n.iq1 += re + im;
      n.iqinf = std::max(n.iqinf, std::max(re, im));
    }
  }
  return n;
}

template <typename Derived>
double iq_norm1(const Eigen::MatrixBase<Derived>& x) {
  return iq_norms(x).iq1;
}

template <typename Derived>
double iq_norm_inf(const Eigen::MatrixBase<Derived>& x) {
  return iq_norms(x).iqinf;
}

inline double iq_norm_inf(cplx z) { return std::max(std::abs(z.real()), std::abs(z.imag())); }

}  // namespace sdsm
