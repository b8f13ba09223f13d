// The operator families P_g behind G^P_g(h,k) = ∫ g^0_2(P_g h, k) vol(g):
// identity, conformal Φ(Vol), curvature-weighted Φ(Scal) and Sobolev (1+Δ)^p.
#pragma once

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gpmetric/krylov.hpp"
#include "gpmetric/tensor_calculus.hpp"

namespace gpmetric {

/// Positive weight function with its derivative, plus the growth bound
/// Φ(u) ≤ C(1 + |u|^{2k}) as metadata.
struct PhiFunction {
  enum class Kind { power, affine_exp, polynomial };

  Kind kind = Kind::power;
  double exponent = 1.0;        // power
  double a = 1.0, b = 0.0;      // affine_exp: a + b e^u
  std::vector<double> coeffs;   // polynomial, lowest degree first
  double bound_c = 1.0;
  double bound_k = 0.5;

  static PhiFunction power(double k) {
    PhiFunction f;
    f.kind = Kind::power;
    f.exponent = k;
    f.bound_c = 1.0;
    f.bound_k = std::abs(k) / 2.0;
    return f;
  }
  static PhiFunction affine_exp(double a, double b) {
    if (!(a > 0.0) || !(b >= 0.0)) throw Error("affine_exp: need a > 0 and b >= 0 for positivity");
    PhiFunction f;
    f.kind = Kind::affine_exp;
    f.a = a;
    f.b = b;
    f.bound_c = a + b;
    f.bound_k = b == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return f;
  }
  static PhiFunction polynomial(std::vector<double> c) {
    if (c.empty()) throw Error("polynomial: no coefficients");
    PhiFunction f;
    f.kind = Kind::polynomial;
    f.coeffs = std::move(c);
    double sum = 0.0;
    for (double x : f.coeffs) sum += std::abs(x);
    f.bound_c = sum;
    f.bound_k = (static_cast<double>(f.coeffs.size()) - 1.0) / 2.0;
    return f;
  }
  static PhiFunction constant(double c) { return polynomial({c}); }

  double value(double u) const {
    switch (kind) {
      case Kind::power:
        return std::pow(u, exponent);
      case Kind::affine_exp:
        return a + b * std::exp(u);
      case Kind::polynomial: {
        double v = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * u + *it;
        return v;
      }
    }
    return 0.0;
  }
  double derivative(double u) const {
    switch (kind) {
      case Kind::power:
        return exponent * std::pow(u, exponent - 1.0);
      case Kind::affine_exp:
        return b * std::exp(u);
      case Kind::polynomial: {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 1;) v = v * u + static_cast<double>(i) * coeffs[i];
        return v;
      }
    }
    return 0.0;
  }
};

struct OperatorSpec {
  enum class Family { identity, conformal, curvature, sobolev };

  Family family = Family::identity;
  PhiFunction phi = PhiFunction::power(1.0);
  int p = 1;
  double solver_tol = 1e-10;
  int max_iterations = 2000;
  /// Curvature family only: keep Φ'(Scal) outside the derivatives in the
  /// adjoint, as if Scal were constant.
  bool literal_curvature_adjoint = false;

  static OperatorSpec identity() { return {}; }
  static OperatorSpec conformal(PhiFunction phi) {
    OperatorSpec s;
    s.family = Family::conformal;
    s.phi = std::move(phi);
    return s;
  }
  static OperatorSpec curvature(PhiFunction phi) {
    OperatorSpec s;
    s.family = Family::curvature;
    s.phi = std::move(phi);
    return s;
  }
  static OperatorSpec sobolev(int p) {
    if (p < 1) throw Error("sobolev order p must be >= 1");
    OperatorSpec s;
    s.family = Family::sobolev;
    s.p = p;
    return s;
  }
};

inline std::string family_name(OperatorSpec::Family f) {
  switch (f) {
    case OperatorSpec::Family::identity:
      return "identity";
    case OperatorSpec::Family::conformal:
      return "conformal";
    case OperatorSpec::Family::curvature:
      return "curvature";
    case OperatorSpec::Family::sobolev:
      return "sobolev";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

namespace detail {

inline SymField from_vector(const Grid& grid, const Vector& v) {
  SymField s(grid);
  s.data() = v;
  return s;
}

/// h + Δh.
inline SymField one_plus_laplacian(const Geometry& geom, const SymField& h) {
  return h + bochner_laplacian(geom, h);
}

inline ScalarField phi_of(const PhiFunction& phi, const ScalarField& u, bool derivative) {
  ScalarField out(u.grid);
  for (std::size_t p = 0; p < u.values.size(); ++p) out[p] = derivative ? phi.derivative(u[p]) : phi.value(u[p]);
  return out;
}

/// Φ(Scal) with the positivity check.
inline ScalarField curvature_weight(const PhiFunction& phi, const ScalarField& scal) {
  ScalarField w = phi_of(phi, scal, false);
  for (std::size_t p = 0; p < w.values.size(); ++p)
    if (!(w[p] > 0.0)) throw Error("curvature weight Φ(Scal) is not positive at point " + std::to_string(p));
  return w;
}

/// Inverse of 1 + Δ̄ by FFT, where Δ̄ = −ḡ^{ij}D_iD_j uses the grid's own
/// first-difference stencil and the mean inverse metric ḡ^{ij}. Exact at
/// constant metrics; elsewhere a preconditioner for the (1+Δ) solve.
class FlatLaplacianInverse {
 public:
  explicit FlatLaplacianInverse(const Geometry& geom) : grid_(geom.grid()) {
    const int n = grid_.dim;
    const std::size_t np = grid_.size();
    double gbar[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* c = geom.inverse().component(SymField::slot(i, j, n));
        for (std::size_t p = 0; p < np; ++p) gbar[i][j] += c[p];
        gbar[i][j] /= static_cast<double>(np);
      }
    // symbol of the stencil ((f₋₂ − f₊₂) + 8(f₊₁ − f₋₁))/(12h) is i(8 sin θ − sin 2θ)/(6h)
    auto s = [&](int axis, int k) {
      const double theta = 2.0 * std::numbers::pi * k / grid_.shape[axis];
      return (8.0 * std::sin(theta) - std::sin(2.0 * theta)) / (6.0 * grid_.spacing[axis]);
    };
    symbol_.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
      const double s0 = s(0, grid_.index(p, 0));
      const double s1 = n == 2 ? s(1, grid_.index(p, 1)) : 0.0;
      symbol_[p] = 1.0 + gbar[0][0] * s0 * s0 + (n == 2 ? 2.0 * gbar[0][1] * s0 * s1 + gbar[1][1] * s1 * s1 : 0.0);
    }
  }

  Vector operator()(const Vector& r) const {
    const std::size_t np = grid_.size();
    Vector out(r.size());
    std::vector<std::complex<double>> buf(np);
    for (std::size_t c = 0; c * np < r.size(); ++c) {
      for (std::size_t p = 0; p < np; ++p) buf[p] = r[c * np + p];
      transform(buf, true);
      for (std::size_t p = 0; p < np; ++p) buf[p] /= symbol_[p];
      transform(buf, false);
      for (std::size_t p = 0; p < np; ++p) out[c * np + p] = buf[p].real();
    }
    return out;
  }

 private:
  /// In-place 1-D or 2-D transform over the row-major point layout.
  void transform(std::vector<std::complex<double>>& data, bool forward) const {
    auto along = [&](std::size_t count, std::size_t stride, std::size_t start) {
      std::vector<std::complex<double>> in(count), out;
      for (std::size_t i = 0; i < count; ++i) in[i] = data[start + i * stride];
      if (forward)
        fft_.fwd(out, in);
      else
        fft_.inv(out, in);
      for (std::size_t i = 0; i < count; ++i) data[start + i * stride] = out[i];
    };
    if (grid_.dim == 1) {
      along(data.size(), 1, 0);
      return;
    }
    const std::size_t n0 = static_cast<std::size_t>(grid_.shape[0]), n1 = static_cast<std::size_t>(grid_.shape[1]);
    for (std::size_t i = 0; i < n0; ++i) along(n1, 1, i * n1);
    for (std::size_t j = 0; j < n1; ++j) along(n0, n1, j);
  }

  Grid grid_;
  std::vector<double> symbol_;
  mutable Eigen::FFT<double> fft_;
};

inline SymField solve_one_plus_laplacian(const Geometry& geom, const SymField& k, const SymField* guess, double tol,
                                         int max_iter) {
  const Grid& grid = geom.grid();
  auto apply = [&](const Vector& x) { return one_plus_laplacian(geom, from_vector(grid, x)).data(); };
  auto dot = [&](const Vector& x, const Vector& y) {
    return integrated_inner(geom, from_vector(grid, x), from_vector(grid, y));
  };
  Vector x = guess ? guess->data() : k.data();
  // the discrete operator is only approximately symmetric for non-flat g, and
  // CG stalls well above the tolerances used here
  const FlatLaplacianInverse precond(geom);
  KrylovResult r = gmres_preconditioned(apply, precond, dot, k.data(), x, tol, max_iter);
  if (!r.converged)
    throw Error("op_solve: Krylov solver did not converge (relative residual " +
                std::to_string(r.relative_residual) + ")");
  return from_vector(grid, x);
}

/// (1+Δ)^j h.
inline SymField power_one_plus_laplacian(const Geometry& geom, SymField h, int j) {
  for (int i = 0; i < j; ++i) h = one_plus_laplacian(geom, h);
  return h;
}

/// Contracts the last two covariant slots of t with a symmetric
/// contravariant field a^{cd}; the result is a (0,2) tensor.
inline TensorField contract_last_two(const TensorField& t, const SymField& a) {
  const int n = t.dim();
  TensorField out(t.grid(), {Index::down, Index::down});
  const std::size_t np = t.points();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double* o = out.component(i * n + j);
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double* in = t.component(((i * n + j) * n + c) * n + d);
          const double* w = a.component(SymField::slot(c, d, n));
          for (std::size_t p = 0; p < np; ++p) o[p] += w[p] * in[p];
        }
    }
  return out;
}

}  // namespace detail

/// Adjoint of m ↦ (D_{(g,m)}Δ)h with respect to g̃^0_2, for symmetric h, k.
inline SymField d_laplacian_adjoint(const Geometry& geom, const SymField& h, const SymField& k) {
  const TensorField ht = h.to_tensor();
  const TensorField kt = k.to_tensor();
  const TensorField dh = covariant_derivative(geom, ht);
  const TensorField ddh = covariant_derivative(geom, dh);
  SymField out = SymField::symmetrize(detail::contract_last_two(ddh, raise_both(geom, k)));
  out -= n_adjoint(geom, dh, tensor_product(geom.metric().to_tensor(), kt));
  out += n_adjoint(geom, ht, covariant_derivative(geom, kt));
  return out;
}

// ---------------------------------------------------------------------------
// Family operations

inline SymField op_apply(const OperatorSpec& P, const Geometry& geom, const SymField& h) {
  switch (P.family) {
    case OperatorSpec::Family::identity:
      return h;
    case OperatorSpec::Family::conformal:
      return P.phi.value(total_volume(geom)) * h;
    case OperatorSpec::Family::curvature:
      return h.scaled(detail::curvature_weight(P.phi, curvature(geom).scal));
    case OperatorSpec::Family::sobolev:
      return detail::power_one_plus_laplacian(geom, h, P.p);
  }
  return h;
}

/// Solves P_g h = k. `guess` warm-starts the Sobolev solve.
inline SymField op_solve(const OperatorSpec& P, const Geometry& geom, const SymField& k,
                         const SymField* guess = nullptr) {
  switch (P.family) {
    case OperatorSpec::Family::identity:
      return k;
    case OperatorSpec::Family::conformal: {
      const double w = P.phi.value(total_volume(geom));
      if (!(w > 0.0)) throw Error("conformal weight Φ(Vol) is not positive");
      return (1.0 / w) * k;
    }
    case OperatorSpec::Family::curvature: {
      ScalarField w = detail::curvature_weight(P.phi, curvature(geom).scal);
      for (double& v : w.values) v = 1.0 / v;
      return k.scaled(w);
    }
    case OperatorSpec::Family::sobolev: {
      // p successive solves of (1+Δ); each to a tighter tolerance
      const double tol = P.solver_tol / (4.0 * P.p);
      if (P.p == 1) return detail::solve_one_plus_laplacian(geom, k, guess, tol, P.max_iterations);
      std::vector<SymField> guesses;
      if (guess) {
        for (int j = P.p - 1; j >= 1; --j) guesses.push_back(detail::power_one_plus_laplacian(geom, *guess, j));
        guesses.push_back(*guess);
      }
      SymField x = k;
      for (int j = 0; j < P.p; ++j)
        x = detail::solve_one_plus_laplacian(geom, x, guess ? &guesses[j] : nullptr, tol, P.max_iterations);
      return x;
    }
  }
  return k;
}

/// (D_{(g,m)}P) h.
inline SymField op_derivative(const OperatorSpec& P, const Geometry& geom, const SymField& m, const SymField& h) {
  switch (P.family) {
    case OperatorSpec::Family::identity:
      return SymField(geom.grid());
    case OperatorSpec::Family::conformal: {
      const double dvol = integrate_density(d_volume_density(geom, m));
      return (P.phi.derivative(total_volume(geom)) * dvol) * h;
    }
    case OperatorSpec::Family::curvature: {
      const Curvature curv = curvature(geom);
      ScalarField w = detail::phi_of(P.phi, curv.scal, true);
      const ScalarField ds = d_scal(geom, curv, m);
      for (std::size_t p = 0; p < w.values.size(); ++p) w[p] *= ds[p];
      return h.scaled(w);
    }
    case OperatorSpec::Family::sobolev: {
      SymField out(geom.grid());
      for (int i = 1; i <= P.p; ++i) {
        const SymField hi = detail::power_one_plus_laplacian(geom, h, P.p - i);
        out += detail::power_one_plus_laplacian(geom, d_laplacian(geom, m, hi), i - 1);
      }
      return out;
    }
  }
  return SymField(geom.grid());
}

/// (D_{(g,.)}P h)^*(k): the g̃^0_2-adjoint of m ↦ (D_{(g,m)}P)h paired with k.
inline SymField op_derivative_adjoint(const OperatorSpec& P, const Geometry& geom, const SymField& h,
                                      const SymField& k) {
  switch (P.family) {
    case OperatorSpec::Family::identity:
      return SymField(geom.grid());
    case OperatorSpec::Family::conformal: {
      const double c = 0.5 * P.phi.derivative(total_volume(geom)) * integrated_inner(geom, h, k);
      return c * geom.metric();
    }
    case OperatorSpec::Family::curvature: {
      const Curvature curv = curvature(geom);
      const ScalarField dphi = detail::phi_of(P.phi, curv.scal, true);
      ScalarField s = pointwise_inner(geom, h, k);
      if (!P.literal_curvature_adjoint) {
        for (std::size_t p = 0; p < s.values.size(); ++p) s[p] *= dphi[p];
      }
      const ScalarField lap = bochner_laplacian(geom, s);
      SymField out = geom.metric().scaled(lap) + hessian(geom, s);
      out -= curv.ricci.scaled(s);
      if (P.literal_curvature_adjoint) out = out.scaled(dphi);
      return out;
    }
    case OperatorSpec::Family::sobolev: {
      SymField out(geom.grid());
      for (int i = 1; i <= P.p; ++i) {
        const SymField hi = detail::power_one_plus_laplacian(geom, h, P.p - i);
        const SymField ki = detail::power_one_plus_laplacian(geom, k, i - 1);
        out += d_laplacian_adjoint(geom, hi, ki);
      }
      return out;
    }
  }
  return SymField(geom.grid());
}

/// G^P_g(h, k).
inline double gp_inner(const OperatorSpec& P, const Geometry& geom, const SymField& h, const SymField& k) {
  return integrated_inner(geom, op_apply(P, geom, h), k);
}

inline SymField op_apply(const OperatorSpec& P, const SymField& g, const SymField& h) {
  return op_apply(P, Geometry(g), h);
}
inline SymField op_solve(const OperatorSpec& P, const SymField& g, const SymField& k) {
  return op_solve(P, Geometry(g), k);
}
inline double gp_inner(const OperatorSpec& P, const SymField& g, const SymField& h, const SymField& k) {
  return gp_inner(P, Geometry(g), h, k);
}

}  // namespace gpmetric
