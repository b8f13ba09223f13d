// Matrix-free conjugate gradient and restarted GMRES over plain vectors with a
// caller-supplied inner product.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gpmetric {

using Vector = std::vector<double>;

struct KrylovResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {
inline void axpy(double a, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}
}  // namespace detail

/// Solves A x = b for an operator symmetric positive definite in `dot`.
/// x holds the initial guess on entry.
template <class Apply, class Dot>
KrylovResult conjugate_gradient(Apply&& apply, Dot&& dot, const Vector& b, Vector& x, double tol, int max_iter) {
  KrylovResult res;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x.assign(b.size(), 0.0);
    res.converged = true;
    return res;
  }
  Vector r = b;
  detail::axpy(-1.0, apply(x), r);
  Vector p = r;
  double rr = dot(r, r);
  for (int it = 0; it < max_iter; ++it) {
    res.relative_residual = std::sqrt(rr) / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      res.iterations = it;
      return res;
    }
    const Vector ap = apply(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    detail::axpy(alpha, p, x);
    detail::axpy(-alpha, ap, r);
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    res.iterations = it + 1;
  }
  // recompute the true residual; the recurrence drifts for nonsymmetric A
  Vector r_true = b;
  detail::axpy(-1.0, apply(x), r_true);
  res.relative_residual = std::sqrt(dot(r_true, r_true)) / bnorm;
  res.converged = res.relative_residual <= tol;
  return res;
}

/// Restarted GMRES(m) with modified Gram-Schmidt and Givens rotations,
/// right-preconditioned by `precond` (an approximation of A⁻¹). The
/// residual tested against tol is the unpreconditioned one.
template <class Apply, class Precond, class Dot>
KrylovResult gmres_preconditioned(Apply&& apply, Precond&& precond, Dot&& dot, const Vector& b, Vector& x, double tol,
                                  int max_iter, int restart = 40) {
  KrylovResult res;
  const std::size_t n = b.size();
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  int total = 0;
  while (total < max_iter) {
    Vector r = b;
    detail::axpy(-1.0, apply(x), r);
    const double beta = std::sqrt(dot(r, r));
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      break;
    }
    const int m = restart;
    std::vector<Vector> v(1, r);
    for (double& e : v[0]) e /= beta;
    std::vector<std::vector<double>> hmat(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), s(m + 1, 0.0);
    s[0] = beta;
    int j = 0;
    std::vector<Vector> z;
    z.reserve(m);
    for (; j < m && total < max_iter; ++j, ++total) {
      z.push_back(precond(v[j]));
      Vector w = apply(z[j]);
      for (int i = 0; i <= j; ++i) {
        hmat[i][j] = dot(w, v[i]);
        detail::axpy(-hmat[i][j], v[i], w);
      }
      hmat[j + 1][j] = std::sqrt(dot(w, w));
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * hmat[i][j] + sn[i] * hmat[i + 1][j];
        hmat[i + 1][j] = -sn[i] * hmat[i][j] + cs[i] * hmat[i + 1][j];
        hmat[i][j] = t;
      }
      const double denom = std::hypot(hmat[j][j], hmat[j + 1][j]);
      cs[j] = denom == 0.0 ? 1.0 : hmat[j][j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : hmat[j + 1][j] / denom;
      hmat[j][j] = denom;
      hmat[j + 1][j] = 0.0;
      s[j + 1] = -sn[j] * s[j];
      s[j] = cs[j] * s[j];
      const double hnext = std::sqrt(dot(w, w));
      if (hnext > 0.0) {
        for (double& e : w) e /= hnext;
      }
      v.push_back(std::move(w));
      if (std::abs(s[j + 1]) / bnorm <= tol || hnext == 0.0) {
        ++j;
        ++total;
        break;
      }
    }
    // back substitution for the least-squares coefficients
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double acc = s[i];
      for (int k = i + 1; k < j; ++k) acc -= hmat[i][k] * y[k];
      y[i] = acc / hmat[i][i];
    }
    for (int i = 0; i < j; ++i) detail::axpy(y[i], z[i], x);
  }
  Vector r = b;
  detail::axpy(-1.0, apply(x), r);
  res.relative_residual = std::sqrt(dot(r, r)) / bnorm;
  res.converged = res.relative_residual <= tol;
  res.iterations = total;
  return res;
}

template <class Apply, class Dot>
KrylovResult gmres(Apply&& apply, Dot&& dot, const Vector& b, Vector& x, double tol, int max_iter, int restart = 40) {
  return gmres_preconditioned(apply, [](const Vector& v) { return v; }, dot, b, x, tol, max_iter, restart);
}

}  // namespace gpmetric
