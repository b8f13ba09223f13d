// The Ricci vector field against G^P: Q(h) = D_{(g,h)}(P_g Ricci_g), its
// g̃⁰₂-adjoint, and the exterior-derivative test for Ricci being a gradient.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gpmetric/operators.hpp"

namespace gpmetric {

/// Largest grid (in points) accepted by the assembled adjoint.
inline constexpr std::size_t max_assembly_points = 24 * 24;

/// P_g Ricci_g.
inline SymField p_ricci(const OperatorSpec& P, const Geometry& geom) {
  return op_apply(P, geom, curvature(geom).ricci);
}

namespace detail {

/// Largest ε ≤ eps with g ± ε·dir positive definite.
inline double spd_safe_step(const SymField& g, const SymField& dir, double eps) {
  for (int i = 0; i < 60; ++i, eps *= 0.5) {
    SymField plus = g, minus = g;
    plus.axpy(eps, dir);
    minus.axpy(-eps, dir);
    if (min_eigenvalue(plus) > 0.0 && min_eigenvalue(minus) > 0.0) return eps;
  }
  throw Error("finite-difference probe leaves the positive-definite cone for every step size");
}

/// Central difference of F along dir with one Richardson refinement:
/// (4 D(ε/2) − D(ε)) / 3 where ε is relative to max|g| / max|dir|.
template <class F>
auto richardson_derivative(F&& f, const SymField& g, const SymField& dir, double eps_rel) {
  const double scale = g.max_abs() / std::max(dir.max_abs(), 1e-300);
  const double eps = spd_safe_step(g, dir, eps_rel * scale);
  auto central = [&](double e) {
    SymField plus = g, minus = g;
    plus.axpy(e, dir);
    minus.axpy(-e, dir);
    auto d = f(plus);
    auto m = f(minus);
    d -= m;
    d *= 1.0 / (2.0 * e);
    return d;
  };
  auto coarse = central(eps);
  auto fine = central(0.5 * eps);
  fine *= 4.0 / 3.0;
  fine.axpy(-1.0 / 3.0, coarse);
  return fine;
}

/// Scalar version of richardson_derivative.
template <class F>
double richardson_scalar(F&& f, const SymField& g, const SymField& dir, double eps_rel) {
  const double scale = g.max_abs() / std::max(dir.max_abs(), 1e-300);
  const double eps = spd_safe_step(g, dir, eps_rel * scale);
  auto central = [&](double e) {
    SymField plus = g, minus = g;
    plus.axpy(e, dir);
    minus.axpy(-e, dir);
    return (f(plus) - f(minus)) / (2.0 * e);
  };
  return (4.0 * central(0.5 * eps) - central(eps)) / 3.0;
}

}  // namespace detail

/// Q(h) = D_{(g,h)}(P Ricci) by Richardson-refined central differences.
inline SymField q_apply(const OperatorSpec& P, const SymField& g, const SymField& h, double eps_rel = 1e-5) {
  if (h.max_abs() == 0.0) return SymField(g.grid());
  return detail::richardson_derivative([&](const SymField& x) { return p_ricci(P, Geometry(x)); }, g, h, eps_rel);
}

/// The discrete matrix of Q in the independent-component basis together
/// with the per-point blocks of the discrete g̃⁰₂ inner product, so that
/// Q* = W⁻¹ Mᵀ W is the exact adjoint of the discrete Q.
class AssembledQ {
 public:
  AssembledQ(const OperatorSpec& P, const SymField& g, double eps_rel = 1e-5) : g_(g) {
    const Grid& grid = g.grid();
    if (grid.size() > max_assembly_points)
      throw Error("q_adjoint: grid has " + std::to_string(grid.size()) + " points, assembly is limited to " +
                  std::to_string(max_assembly_points));
    n_ = grid.dim;
    np_ = grid.size();
    comps_ = SymField::count(n_);
    const std::size_t N = comps_ * np_;
    M_.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    SymField e(grid);
    for (std::size_t j = 0; j < N; ++j) {
      e.data()[j] = 1.0;
      const SymField col = q_apply(P, g, e, eps_rel);
      for (std::size_t i = 0; i < N; ++i) M_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col.data()[i];
      e.data()[j] = 0.0;
    }
    build_weights();
  }

  const Eigen::MatrixXd& matrix() const { return M_; }

  SymField apply(const SymField& h) const {
    const Eigen::Map<const Eigen::VectorXd> x(h.data().data(), static_cast<Eigen::Index>(h.data().size()));
    SymField out(g_.grid());
    Eigen::Map<Eigen::VectorXd>(out.data().data(), static_cast<Eigen::Index>(out.data().size())) = M_ * x;
    return out;
  }

  SymField adjoint(const SymField& k) const {
    const Eigen::VectorXd wk = weight(k.data(), false);
    const Eigen::VectorXd mt = M_.transpose() * wk;
    SymField out(g_.grid());
    const Eigen::VectorXd y = weight(std::vector<double>(mt.data(), mt.data() + mt.size()), true);
    std::copy(y.data(), y.data() + y.size(), out.data().begin());
    return out;
  }

 private:
  /// W_p(s,t) = Tr(g⁻¹E_s g⁻¹E_t) vol_p with E_s the unit symmetric basis.
  void build_weights() {
    const Geometry geom(g_);
    const double cell = g_.grid().cell_volume();
    blocks_.resize(np_);
    solvers_.resize(np_);
    for (std::size_t p = 0; p < np_; ++p) {
      Eigen::MatrixXd gm(n_, n_);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) gm(i, j) = g_(i, j, p);
      const Eigen::MatrixXd gi = gm.inverse();
      std::vector<Eigen::MatrixXd> basis;
      for (int s = 0; s < static_cast<int>(comps_); ++s) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j)
            if (SymField::slot(i, j, n_) == s) E(i, j) = 1.0;
        basis.push_back(E);
      }
      Eigen::MatrixXd W(comps_, comps_);
      for (std::size_t s = 0; s < comps_; ++s)
        for (std::size_t t = 0; t < comps_; ++t)
          W(s, t) = (gi * basis[s] * gi * basis[t]).trace() * geom.density()[p] * cell;
      blocks_[p] = W;
      solvers_[p] = W.ldlt();
    }
  }

  /// W x, or W⁻¹ x when inverse is set, blockwise per point.
  Eigen::VectorXd weight(const std::vector<double>& x, bool inverse) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd v(comps_);
    for (std::size_t p = 0; p < np_; ++p) {
      for (std::size_t s = 0; s < comps_; ++s) v(s) = x[s * np_ + p];
      const Eigen::VectorXd w = inverse ? Eigen::VectorXd(solvers_[p].solve(v)) : Eigen::VectorXd(blocks_[p] * v);
      for (std::size_t s = 0; s < comps_; ++s) out(static_cast<Eigen::Index>(s * np_ + p)) = w(s);
    }
    return out;
  }

  SymField g_;
  int n_ = 0;
  std::size_t np_ = 0, comps_ = 0;
  Eigen::MatrixXd M_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> solvers_;
};

/// Q*(k) through the assembled matrix.
inline SymField q_adjoint(const OperatorSpec& P, const SymField& g, const SymField& k) {
  return AssembledQ(P, g).adjoint(k);
}

namespace detail {

/// Q(h) − Q*(h) + ½(P Ricci)Tr(g⁻¹h) − ½ g·g⁰₂(P Ricci, h).
inline SymField curl_integrand(const OperatorSpec& P, const SymField& g, const SymField& h, const AssembledQ& q) {
  const Geometry geom(g);
  const SymField pr = p_ricci(P, geom);
  SymField out = q.apply(h) - q.adjoint(h);
  out += 0.5 * pr.scaled(trace_metric(geom, h));
  out -= 0.5 * g.scaled(pointwise_inner(geom, pr, h));
  return out;
}

}  // namespace detail

struct CurlResult {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// hG^P(Ricci,k) − kG^P(Ricci,h) by finite differences (lhs) against
/// ∫g⁰₂(Q(h) − Q*(h) + ½(P Ricci)Tr(g⁻¹h) − ½g·g⁰₂(P Ricci,h), k) vol (rhs).
inline CurlResult curl_residual(const OperatorSpec& P, const SymField& g, const SymField& h, const SymField& k,
                                double eps_rel = 1e-5) {
  auto pairing_with = [&](const SymField& fixed) {
    return [&P, &fixed](const SymField& x) {
      const Geometry geom(x);
      return gp_inner(P, geom, curvature(geom).ricci, fixed);
    };
  };
  CurlResult out;
  const double hk = h.max_abs() == 0.0 ? 0.0 : detail::richardson_scalar(pairing_with(k), g, h, eps_rel);
  const double kh = k.max_abs() == 0.0 ? 0.0 : detail::richardson_scalar(pairing_with(h), g, k, eps_rel);
  out.lhs = hk - kh;
  const AssembledQ q(P, g, eps_rel);
  out.rhs = integrated_inner(Geometry(g), detail::curl_integrand(P, g, h, q), k);
  return out;
}

/// g̃⁰₂-norm of 2(Q(h) − Q*(h)) + (P Ricci)Tr(g⁻¹h) − g·g⁰₂(P Ricci, h);
/// zero for every h iff Ricci is locally a G^P-gradient.
inline double gradient_condition_residual(const OperatorSpec& P, const SymField& g, const SymField& h) {
  const AssembledQ q(P, g);
  const SymField r = 2.0 * detail::curl_integrand(P, g, h, q);
  return std::sqrt(std::max(0.0, integrated_inner(Geometry(g), r, r)));
}

}  // namespace gpmetric
