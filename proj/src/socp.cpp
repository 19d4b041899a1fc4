// SPDX-License-Identifier: Apache-2.0

#include "sdsm/socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdsm/errors.hpp"

namespace sdsm {

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::MaxIterations:
      return "max-iterations";
    case SolveStatus::Stalled:
      return "stalled";
  }
  return "unknown";
}

void ConeProgram::validate() const {
  std::size_t rows = n_linear;
  for (auto q : soc_dims) {
    if (q < 2) throw ShapeError("second-order cone blocks need dimension >= 2");
    rows += q;
  }
  if (rows != n_rows()) throw ShapeError("cone block sizes do not match the number of rows of h");
  if (static_cast<std::size_t>(g.rows()) != n_rows() || static_cast<std::size_t>(g.cols()) != n_vars()) {
    throw ShapeError("G must be (rows of h) x (length of c)");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Seg = Eigen::Ref<const RVector>;

struct Block {
  Eigen::Index offset;
  Eigen::Index size;
};

class Cone {
 public:
  explicit Cone(const ConeProgram& p) : n_linear_(static_cast<Eigen::Index>(p.n_linear)) {
    Eigen::Index off = n_linear_;
    for (auto q : p.soc_dims) {
      socs_.push_back({off, static_cast<Eigen::Index>(q)});
      off += static_cast<Eigen::Index>(q);
    }
    rows_ = off;
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index n_linear() const { return n_linear_; }
  const std::vector<Block>& socs() const { return socs_; }
  double degree() const { return static_cast<double>(n_linear_ + static_cast<Eigen::Index>(socs_.size())); }

  void add_identity(RVector& v, double scale) const {
    v.head(n_linear_).array() += scale;
    for (const auto& b : socs_) v[b.offset] += scale;
  }

  // Smallest "eigenvalue" of v in the cone's Jordan algebra.
  double min_eig(const RVector& v) const {
    double m = kInf;
    if (n_linear_ > 0) m = v.head(n_linear_).minCoeff();
    for (const auto& b : socs_) {
      m = std::min(m, v[b.offset] - v.segment(b.offset + 1, b.size - 1).norm());
    }
    return m;
  }

  // Moves v strictly inside the cone if it is not already.
  void shift_inside(RVector& v) const {
    const double e = min_eig(v);
    if (e <= 0.0) add_identity(v, 1.0 - e);
  }

  double max_step(const RVector& x, const RVector& dx) const {
    double alpha = kInf;
    for (Eigen::Index i = 0; i < n_linear_; ++i) {
      if (dx[i] < 0.0) alpha = std::min(alpha, -x[i] / dx[i]);
    }
    for (const auto& b : socs_) alpha = std::min(alpha, soc_step(x.segment(b.offset, b.size), dx.segment(b.offset, b.size)));
    return alpha;
  }

  RVector jordan(const RVector& u, const RVector& v) const {
    RVector r(rows_);
    r.head(n_linear_) = u.head(n_linear_).cwiseProduct(v.head(n_linear_));
    for (const auto& b : socs_) {
      const auto u1 = u.segment(b.offset + 1, b.size - 1);
      const auto v1 = v.segment(b.offset + 1, b.size - 1);
      r[b.offset] = u.segment(b.offset, b.size).dot(v.segment(b.offset, b.size));
      r.segment(b.offset + 1, b.size - 1) = u[b.offset] * v1 + v[b.offset] * u1;
    }
    return r;
  }

  // Solves lambda o x = r for x.
  RVector jordan_solve(const RVector& lambda, const RVector& r) const {
    RVector x(rows_);
    x.head(n_linear_) = r.head(n_linear_).cwiseQuotient(lambda.head(n_linear_));
    for (const auto& b : socs_) {
      const double l0 = lambda[b.offset];
      const auto l1 = lambda.segment(b.offset + 1, b.size - 1);
      const double r0 = r[b.offset];
      const auto r1 = r.segment(b.offset + 1, b.size - 1);
      const double det = l0 * l0 - l1.squaredNorm();
      const double x0 = (l0 * r0 - l1.dot(r1)) / det;
      x[b.offset] = x0;
      x.segment(b.offset + 1, b.size - 1) = (r1 - x0 * l1) / l0;
    }
    return x;
  }

 private:
  static double soc_step(Seg x, Seg dx) {
    const double a = dx[0] * dx[0] - dx.tail(dx.size() - 1).squaredNorm();
    const double b = x[0] * dx[0] - x.tail(x.size() - 1).dot(dx.tail(dx.size() - 1));
    const double c = std::max(x[0] * x[0] - x.tail(x.size() - 1).squaredNorm(), 0.0);
    // q(alpha) = a alpha^2 + 2 b alpha + c, first positive root is the exit.
    double alpha = kInf;
    if (dx[0] < 0.0) alpha = -x[0] / dx[0];
    const double scale = std::max({std::abs(a), std::abs(b), c, 1e-300});
    if (std::abs(a) <= 1e-14 * scale) {
      if (b < 0.0) alpha = std::min(alpha, -c / (2.0 * b));
      return alpha;
    }
    const double disc = b * b - a * c;
    if (disc < 0.0) return alpha;
    const double sq = std::sqrt(disc);
    const double r1 = (-b - std::copysign(sq, b)) / a;
    const double r2 = (r1 != 0.0) ? c / (a * r1) : kInf;
    for (double r : {r1, r2}) {
      if (r > 0.0) alpha = std::min(alpha, r);
    }
    return alpha;
  }

  Eigen::Index n_linear_;
  Eigen::Index rows_ = 0;
  std::vector<Block> socs_;
};

// Nesterov-Todd scaling W with W z = W^{-1} s = lambda.
class Scaling {
 public:
  Scaling(const Cone& cone, const RVector& s, const RVector& z) : cone_(cone) {
    const Eigen::Index l = cone.n_linear();
    d_ = (s.head(l).array() / z.head(l).array()).sqrt();
    for (const auto& b : cone.socs()) {
      const auto sb = s.segment(b.offset, b.size);
      const auto zb = z.segment(b.offset, b.size);
      const double sn = std::sqrt(std::max(sb[0] * sb[0] - sb.tail(b.size - 1).squaredNorm(), 1e-300));
      const double zn = std::sqrt(std::max(zb[0] * zb[0] - zb.tail(b.size - 1).squaredNorm(), 1e-300));
      const RVector sbar = sb / sn;
      const RVector zbar = zb / zn;
      const double gamma = std::sqrt(std::max((1.0 + sbar.dot(zbar)) / 2.0, 1e-300));
      RVector w(b.size);
      w[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
      w.tail(b.size - 1) = (sbar.tail(b.size - 1) - zbar.tail(b.size - 1)) / (2.0 * gamma);
      beta_.push_back(std::sqrt(sn / zn));
      w_.push_back(std::move(w));
    }
  }

  // W v (inverse = false) or W^{-1} v (inverse = true), applied to every column.
  template <typename Derived>
  void apply(Eigen::MatrixBase<Derived>& v, bool inverse) const {
    const Eigen::Index l = cone_.n_linear();
    for (Eigen::Index i = 0; i < l; ++i) v.row(i) *= inverse ? 1.0 / d_[i] : d_[i];
    for (std::size_t k = 0; k < w_.size(); ++k) {
      const Block& b = cone_.socs()[k];
      const RVector& w = w_[k];
      const double w0 = w[0];
      const auto w1 = w.tail(b.size - 1);
      const double sign = inverse ? -1.0 : 1.0;
      const double scale = inverse ? 1.0 / beta_[k] : beta_[k];
      auto blk = v.middleRows(b.offset, b.size);
      for (Eigen::Index col = 0; col < v.cols(); ++col) {
        const double v0 = blk(0, col);
        const double dot = w1.dot(blk.col(col).tail(b.size - 1));
        blk(0, col) = scale * (w0 * v0 + sign * dot);
        blk.col(col).tail(b.size - 1) =
            scale * (blk.col(col).tail(b.size - 1) + (sign * v0 + dot / (1.0 + w0)) * w1);
      }
    }
  }

  RVector times(const RVector& v) const {
    RVector r = v;
    apply(r, false);
    return r;
  }
  RVector solve(const RVector& v) const {
    RVector r = v;
    apply(r, true);
    return r;
  }

 private:
  const Cone& cone_;
  RVector d_;
  std::vector<double> beta_;
  std::vector<RVector> w_;
};

struct Direction {
  RVector dx, ds, dz;
};

class NewtonSystem {
 public:
  NewtonSystem(const ConeProgram& p, const Cone& cone, const Scaling& w)
      : p_(p), cone_(cone), w_(w) {
    scaled_g_ = p.g;
    w_.apply(scaled_g_, true);
    RMatrix h = scaled_g_.transpose() * scaled_g_;
    // Symmetric diagonal equilibration, then Cholesky; a tiny shift only if
    // the scaled matrix is numerically indefinite.
    scale_ = h.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    h = scale_.asDiagonal() * h * scale_.asDiagonal();
    llt_.compute(h);
    if (llt_.info() != Eigen::Success) {
      h.diagonal().array() += 1e-12;
      llt_.compute(h);
    }
    ok_ = llt_.info() == Eigen::Success;
  }

  bool ok() const { return ok_; }

  // Solves G^T dz = -rx, G dx + ds = -rz, lambda o (W dz + W^{-1} ds) = rc.
  // Iterative refinement against the unshifted linearization.
  Direction solve(const RVector& rx, const RVector& rz, const RVector& lambda,
                  const RVector& rc) const {
    Direction d = solve_once(rx, rz, lambda, rc);
    double last = kInf;
    for (int pass = 0; pass < 5; ++pass) {
      const RVector e1 = -rx - p_.g.transpose() * d.dz;
      const RVector e2 = -rz - p_.g * d.dx - d.ds;
      const RVector e3 = rc - cone_.jordan(lambda, w_.times(d.dz) + w_.solve(d.ds));
      const double err = std::max({e1.lpNorm<Eigen::Infinity>(), e2.lpNorm<Eigen::Infinity>(),
                                   e3.lpNorm<Eigen::Infinity>()});
      if (!(err > 1e-15) || !(err < 0.5 * last)) break;
      last = err;
      const Direction c = solve_once(-e1, -e2, lambda, e3);
      if (!c.dx.allFinite()) break;
      d.dx += c.dx;
      d.ds += c.ds;
      d.dz += c.dz;
    }
    return d;
  }

 private:
  Direction solve_once(const RVector& rx, const RVector& rz, const RVector& lambda,
                       const RVector& rc) const {
    const RVector u = cone_.jordan_solve(lambda, rc);
    // W^{-1}(rz + W u) = W^{-1} rz + u
    const RVector t = w_.solve(rz) + u;
    const RVector rhs = -rx - scaled_g_.transpose() * t;
    Direction d;
    d.dx = scale_.cwiseProduct(llt_.solve(scale_.cwiseProduct(rhs)));
    // dz = W^{-1} (W^{-1} G dx + t)
    const RVector inner = scaled_g_ * d.dx + t;
    d.dz = w_.solve(inner);
    // ds = W (u - W dz) = W (u - inner)
    d.ds = w_.times(u - inner);
    return d;
  }

  const ConeProgram& p_;
  const Cone& cone_;
  const Scaling& w_;
  RMatrix scaled_g_;
  RVector scale_;
  Eigen::LLT<RMatrix> llt_;
  bool ok_ = false;
};

}  // namespace

SolverResult solve_cone_program(const ConeProgram& p, const SolverOptions& opts) {
  p.validate();
  if (!(opts.tol > 0.0)) throw DomainError("solver tolerance must be positive");
  const Cone cone(p);
  const double h_scale = std::max(1.0, p.h.norm());
  const double c_scale = std::max(1.0, p.c.norm());

  SolverResult res;
  // Least-squares primal start and least-norm dual start, pushed into the cone.
  const RMatrix gtg = p.g.transpose() * p.g;
  Eigen::LDLT<RMatrix> gtg_fact(gtg);
  if (gtg_fact.info() != Eigen::Success) throw NumericalError("G must have full column rank");
  RVector x = gtg_fact.solve(p.g.transpose() * p.h);
  RVector s = p.h - p.g * x;
  RVector z = -(p.g * gtg_fact.solve(p.c));
  cone.shift_inside(s);
  cone.shift_inside(z);

  auto record = [&](std::size_t it) {
    res.x = x;
    res.s = s;
    res.z = z;
    res.iterations = it;
    res.primal_cost = p.c.dot(x);
    res.dual_cost = -p.h.dot(z);
    res.primal_residual = (p.g * x + s - p.h).norm() / h_scale;
    res.dual_residual = (p.g.transpose() * z + p.c).norm() / c_scale;
    res.gap = s.dot(z);
    const double denom = std::max(std::abs(res.primal_cost), std::abs(res.dual_cost));
    res.relative_gap = denom > 0.0 ? res.gap / denom : kInf;
  };
  auto converged = [&] {
    return res.primal_residual <= opts.tol && res.dual_residual <= opts.tol &&
           (res.relative_gap <= opts.tol || res.gap <= 1e-2 * opts.tol);
  };

  // Unconverged exits hand back the iterate with the smallest worst-case measure.
  SolverResult best;
  double best_merit = kInf;
  auto give_up = [&](SolveStatus status) {
    best.status = status;
    return best;
  };

  for (std::size_t it = 0;; ++it) {
    record(it);
    if (converged()) {
      res.status = SolveStatus::Optimal;
      return res;
    }
    const double merit =
        std::max({res.primal_residual, res.dual_residual, std::min(res.gap, res.relative_gap)});
    if (merit < best_merit) {
      best_merit = merit;
      best = res;
    }
    best.iterations = it;
    if (it >= opts.max_iterations) return give_up(SolveStatus::MaxIterations);

    const RVector rx = p.g.transpose() * z + p.c;
    const RVector rz = p.g * x + s - p.h;
    const double mu = s.dot(z) / cone.degree();

    const Scaling w(cone, s, z);
    const RVector lambda = w.times(z);
    const NewtonSystem kkt(p, cone, w);
    if (!kkt.ok()) return give_up(SolveStatus::Stalled);

    // Predictor.
    const RVector ll = cone.jordan(lambda, lambda);
    const Direction aff = kkt.solve(rx, rz, lambda, -ll);
    const double a_aff = std::min(1.0, std::min(cone.max_step(s, aff.ds), cone.max_step(z, aff.dz)));
    const double sigma = std::pow(1.0 - a_aff, 3.0);

    // Corrector with Mehrotra second-order term, in scaled coordinates.
    const RVector ds_scaled = w.solve(aff.ds);
    const RVector dz_scaled = w.times(aff.dz);
    RVector rc = -ll - cone.jordan(ds_scaled, dz_scaled);
    cone.add_identity(rc, sigma * mu);
    const Direction dir = kkt.solve(rx, rz, lambda, rc);

    const double a_max = std::min(cone.max_step(s, dir.ds), cone.max_step(z, dir.dz));
    const double alpha = std::min(1.0, opts.step_fraction * a_max);
    if (!(alpha > 1e-14) || !dir.dx.allFinite()) return give_up(SolveStatus::Stalled);
    x += alpha * dir.dx;
    s += alpha * dir.ds;
    z += alpha * dir.dz;
  }
}

}  // namespace sdsm
