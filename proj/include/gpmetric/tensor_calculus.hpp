// Pointwise and differential tensor calculus for a metric on a flat torus:
// tensor metrics, volume density, Levi-Civita connection, adjoint derivative,
// Bochner Laplacian, curvature and the first variations of these in g.
#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gpmetric/grid.hpp"

namespace gpmetric {

/// Per-point metric data shared by the differential operators: g, g^{-1},
/// the volume density sqrt(det g) and the Christoffel symbols Γ^i_{jk}
/// (slots up, down, down).
class Geometry {
 public:
  explicit Geometry(const SymField& g) : g_(g), ginv_(g.grid()), vol_(g.grid()) {
    const std::size_t np = g.points();
    const int n = g.dim();
    for (std::size_t p = 0; p < np; ++p) {
      double det;
      if (n == 1) {
        det = g(0, 0, p);
        if (!(std::abs(det) > 0.0) || !std::isfinite(det))
          throw Error("metric_inverse: singular metric at point " + std::to_string(p));
        ginv_(0, 0, p) = 1.0 / det;
      } else {
        const double a = g(0, 0, p), b = g(0, 1, p), c = g(1, 1, p);
        det = a * c - b * b;
        const double lo = std::abs(min_eigenvalue_at(g, p)), hi = std::abs(max_eigenvalue_at(g, p));
        const double small = std::min(lo, hi), large = std::max(lo, hi);
        if (!(det != 0.0) || !std::isfinite(det) || !(large <= 1e12 * small))
          throw Error("metric_inverse: near-singular metric at point " + std::to_string(p) + " (grid index " +
                      std::to_string(g.grid().index(p, 0)) + "," + std::to_string(g.grid().index(p, 1)) + ")");
        ginv_(0, 0, p) = c / det;
        ginv_(0, 1, p) = -b / det;
        ginv_(1, 1, p) = a / det;
      }
      vol_[p] = std::sqrt(det);
    }
    build_christoffel();
  }

  const Grid& grid() const { return g_.grid(); }
  int dim() const { return g_.dim(); }
  std::size_t points() const { return g_.points(); }
  const SymField& metric() const { return g_; }
  const SymField& inverse() const { return ginv_; }
  const ScalarField& density() const { return vol_; }
  const TensorField& christoffel() const { return gamma_; }
  const TensorField& negative_christoffel() const { return neg_gamma_; }

 private:
  void build_christoffel() {
    const Grid& grid = g_.grid();
    const int n = grid.dim;
    const std::size_t np = grid.size();
    // dg[a][s] = partial_a of independent component s
    std::vector<std::vector<double>> dg(n * SymField::count(n), std::vector<double>(np));
    for (int a = 0; a < n; ++a)
      for (int s = 0; s < SymField::count(n); ++s)
        differentiate_component(grid, a, g_.component(s), dg[a * SymField::count(n) + s].data());
    auto d = [&](int a, int i, int j) -> const std::vector<double>& {
      return dg[a * SymField::count(n) + SymField::slot(i, j, n)];
    };
    // lowered symbols Γ_{l jk}
    TensorField lowered(grid, {Index::down, Index::down, Index::down});
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double* out = lowered.component((l * n + j) * n + k);
          const auto &a = d(j, l, k), &b = d(k, l, j), &c = d(l, j, k);
          for (std::size_t p = 0; p < np; ++p) out[p] = 0.5 * (a[p] + b[p] - c[p]);
        }
    gamma_ = TensorField(grid, {Index::up, Index::down, Index::down});
    for (int i = 0; i < n; ++i)
      for (int jk = 0; jk < n * n; ++jk) {
        double* out = gamma_.component(i * n * n + jk);
        for (int l = 0; l < n; ++l) {
          const double* gi = ginv_.component(SymField::slot(i, l, n));
          const double* low = lowered.component(l * n * n + jk);
          for (std::size_t p = 0; p < np; ++p) out[p] += gi[p] * low[p];
        }
      }
    neg_gamma_ = -1.0 * gamma_;
  }

  SymField g_;
  SymField ginv_;
  ScalarField vol_;
  TensorField gamma_;
  TensorField neg_gamma_;
};

// ---------------------------------------------------------------------------
// Pointwise algebra

/// g^{-1} as a (2,0) tensor field.
inline TensorField metric_inverse(const Geometry& geom) {
  TensorField t = geom.inverse().to_tensor();
  TensorField out(geom.grid(), {Index::up, Index::up});
  out.data() = t.data();
  return out;
}
inline TensorField metric_inverse(const SymField& g) { return metric_inverse(Geometry(g)); }

/// Contracts one slot with a symmetric matrix field: out_{..a..} = M_{ab} T_{..b..}.
inline TensorField transform_slot(const TensorField& t, int slot, const SymField& m, Index variance) {
  auto slots = t.slots();
  slots[slot] = variance;
  TensorField out(t.grid(), slots);
  const int n = t.dim(), r = t.rank();
  const std::size_t np = t.points();
  for (std::size_t c = 0; c < out.components(); ++c) {
    Digits d = component_digits(c, r, n);
    const int a = d[slot];
    double* o = out.component(c);
    for (int b = 0; b < n; ++b) {
      d[slot] = b;
      const double* in = t.component(component_index(d, r, n));
      const double* mab = m.component(SymField::slot(a, b, n));
      for (std::size_t p = 0; p < np; ++p) o[p] += mab[p] * in[p];
    }
  }
  return out;
}

/// Flips every slot: covariant slots are raised with g^{-1}, contravariant
/// slots lowered with g.
inline TensorField flip_all_slots(const Geometry& geom, const TensorField& t) {
  TensorField out = t;
  for (int s = 0; s < t.rank(); ++s) {
    if (out.slot(s) == Index::down)
      out = transform_slot(out, s, geom.inverse(), Index::up);
    else
      out = transform_slot(out, s, geom.metric(), Index::down);
  }
  return out;
}

inline TensorField lower_all(const Geometry& geom, const TensorField& t) {
  TensorField out = t;
  for (int s = 0; s < t.rank(); ++s)
    if (out.slot(s) == Index::up) out = transform_slot(out, s, geom.metric(), Index::down);
  return out;
}

/// g^r_s(A, B) at every point: full contraction with one g or g^{-1} per slot.
inline ScalarField pointwise_inner(const Geometry& geom, const TensorField& a, const TensorField& b) {
  if (!a.same_type(b)) throw Error("pointwise_inner: tensor ranks do not match");
  const TensorField raised = flip_all_slots(geom, b);
  ScalarField out(geom.grid());
  const std::size_t np = a.points();
  for (std::size_t c = 0; c < a.components(); ++c) {
    const double* x = a.component(c);
    const double* y = raised.component(c);
    for (std::size_t p = 0; p < np; ++p) out[p] += x[p] * y[p];
  }
  return out;
}

/// Tr(g^{-1} a g^{-1} b) for symmetric fields.
inline ScalarField pointwise_inner(const Geometry& geom, const SymField& a, const SymField& b) {
  ScalarField out(geom.grid());
  const int n = geom.dim();
  const SymField& gi = geom.inverse();
  for (std::size_t p = 0; p < geom.points(); ++p) {
    if (n == 1) {
      const double w = gi(0, 0, p);
      out[p] = w * a(0, 0, p) * w * b(0, 0, p);
      continue;
    }
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) s += gi(i, k, p) * gi(j, l, p) * a(i, j, p) * b(k, l, p);
    out[p] = s;
  }
  return out;
}

/// Tr(g^{-1} m) at every point.
inline ScalarField trace_metric(const Geometry& geom, const SymField& m) {
  ScalarField out(geom.grid());
  const int n = geom.dim();
  for (std::size_t p = 0; p < geom.points(); ++p) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += geom.inverse()(i, j, p) * m(i, j, p);
    out[p] = s;
  }
  return out;
}

/// a g^{-1} b + b g^{-1} a (symmetric by construction).
inline SymField symmetric_product(const Geometry& geom, const SymField& a, const SymField& b) {
  SymField out(geom.grid());
  const int n = geom.dim();
  const SymField& gi = geom.inverse();
  for (std::size_t p = 0; p < geom.points(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            s += a(i, k, p) * gi(k, l, p) * b(l, j, p) + b(i, k, p) * gi(k, l, p) * a(l, j, p);
        out(i, j, p) = s;
      }
  return out;
}

/// g^{-1} m g^{-1}, stored as a symmetric field of contravariant components.
inline SymField raise_both(const Geometry& geom, const SymField& m) {
  SymField out(geom.grid());
  const int n = geom.dim();
  const SymField& gi = geom.inverse();
  for (std::size_t p = 0; p < geom.points(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) s += gi(i, k, p) * m(k, l, p) * gi(l, j, p);
        out(i, j, p) = s;
      }
  return out;
}

inline TensorField tensor_product(const TensorField& a, const TensorField& b) {
  auto slots = a.slots();
  slots.insert(slots.end(), b.slots().begin(), b.slots().end());
  TensorField out(a.grid(), slots);
  const std::size_t nb = b.components(), np = a.points();
  for (std::size_t ca = 0; ca < a.components(); ++ca)
    for (std::size_t cb = 0; cb < nb; ++cb) {
      double* o = out.component(ca * nb + cb);
      const double* x = a.component(ca);
      const double* y = b.component(cb);
      for (std::size_t p = 0; p < np; ++p) o[p] = x[p] * y[p];
    }
  return out;
}

// ---------------------------------------------------------------------------
// Traces (always over the first two slots)

/// Tr: T^r_s -> T^{r-1}_{s-1}; slots 0 and 1 must have opposite variance.
inline TensorField trace_first_two(const TensorField& t) {
  if (t.rank() < 2 || t.slot(0) == t.slot(1))
    throw Error("trace_first_two: first two slots must be one contravariant and one covariant");
  std::vector<Index> slots(t.slots().begin() + 2, t.slots().end());
  TensorField out(t.grid(), slots);
  const int n = t.dim();
  const std::size_t rest = out.components(), np = t.points();
  for (std::size_t c = 0; c < rest; ++c) {
    double* o = out.component(c);
    for (int i = 0; i < n; ++i) {
      const double* in = t.component((static_cast<std::size_t>(i) * n + i) * rest + c);
      for (std::size_t p = 0; p < np; ++p) o[p] += in[p];
    }
  }
  return out;
}

/// Contracts the first two (covariant) slots with a symmetric contravariant
/// field a^{ij}.
inline TensorField trace_with(const TensorField& t, const SymField& a) {
  if (t.rank() < 2 || t.slot(0) != Index::down || t.slot(1) != Index::down)
    throw Error("trace_g: first two slots must be covariant");
  std::vector<Index> slots(t.slots().begin() + 2, t.slots().end());
  TensorField out(t.grid(), slots);
  const int n = t.dim();
  const std::size_t rest = out.components(), np = t.points();
  for (std::size_t c = 0; c < rest; ++c) {
    double* o = out.component(c);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* in = t.component((static_cast<std::size_t>(i) * n + j) * rest + c);
        const double* w = a.component(SymField::slot(i, j, n));
        for (std::size_t p = 0; p < np; ++p) o[p] += w[p] * in[p];
      }
  }
  return out;
}

/// Tr^g: T^r_s -> T^r_{s-2}.
inline TensorField trace_g(const Geometry& geom, const TensorField& t) { return trace_with(t, geom.inverse()); }

// ---------------------------------------------------------------------------
// Covariant derivative and relatives

/// Derivation-style sum over the slots of t, prepending a covariant slot j:
///   out_{j,..a..} = sum_{up slots} U^a_{jl} t_{..l..} + sum_{down slots} D^l_{ja} t_{..l..}
/// where U and D are (1,2) fields with component order (upper, j, lower).
inline TensorField derivation_sum(const TensorField& up_op, const TensorField& down_op, const TensorField& t) {
  const int n = t.dim(), r = t.rank();
  std::vector<Index> slots{Index::down};
  slots.insert(slots.end(), t.slots().begin(), t.slots().end());
  TensorField out(t.grid(), slots);
  const std::size_t np = t.points();
  for (std::size_t c = 0; c < out.components(); ++c) {
    const Digits d = component_digits(c, r + 1, n);
    const int j = d[0];
    double* o = out.component(c);
    for (int s = 0; s < r; ++s) {
      Digits src{};
      for (int q = 0; q < r; ++q) src[q] = d[q + 1];
      const int a = src[s];
      for (int l = 0; l < n; ++l) {
        src[s] = l;
        const double* in = t.component(component_index(src, r, n));
        const double* coef = t.slot(s) == Index::up ? up_op.component((a * n + j) * n + l)
                                                    : down_op.component((l * n + j) * n + a);
        for (std::size_t p = 0; p < np; ++p) o[p] += coef[p] * in[p];
      }
    }
  }
  return out;
}

/// Levi-Civita covariant derivative; the derivative slot is prepended.
inline TensorField covariant_derivative(const Geometry& geom, const TensorField& t) {
  TensorField out = derivation_sum(geom.christoffel(), geom.negative_christoffel(), t);
  const int n = t.dim();
  const std::size_t block = t.components();
  std::vector<double> tmp(t.points());
  for (int j = 0; j < n; ++j)
    for (std::size_t c = 0; c < block; ++c) {
      differentiate_component(t.grid(), j, t.component(c), tmp.data());
      double* o = out.component(j * block + c);
      for (std::size_t p = 0; p < tmp.size(); ++p) o[p] += tmp[p];
    }
  return out;
}

inline TensorField covariant_derivative(const Geometry& geom, const SymField& h) {
  return covariant_derivative(geom, h.to_tensor());
}

/// Formal adjoint of the covariant derivative: -Tr^g(∇B).
inline TensorField nabla_star(const Geometry& geom, const TensorField& b) {
  if (b.rank() < 1 || b.slot(0) != Index::down) throw Error("nabla_star: first slot must be covariant");
  TensorField out = trace_g(geom, covariant_derivative(geom, b));
  out *= -1.0;
  return out;
}

/// Bochner Laplacian ∇*∇.
inline TensorField bochner_laplacian(const Geometry& geom, const TensorField& h) {
  return nabla_star(geom, covariant_derivative(geom, h));
}

inline SymField bochner_laplacian(const Geometry& geom, const SymField& h) {
  return SymField::symmetrize(bochner_laplacian(geom, h.to_tensor()));
}

inline ScalarField bochner_laplacian(const Geometry& geom, const ScalarField& f) {
  return bochner_laplacian(geom, TensorField::from_scalar(f)).to_scalar();
}

/// Hessian ∇²f of a function, symmetrized.
inline SymField hessian(const Geometry& geom, const ScalarField& f) {
  const TensorField df = covariant_derivative(geom, TensorField::from_scalar(f));
  return SymField::symmetrize(covariant_derivative(geom, df));
}

// ---------------------------------------------------------------------------
// Integrated metrics and volume

inline const ScalarField& volume_density(const Geometry& geom) { return geom.density(); }
inline double total_volume(const Geometry& geom) { return integrate_density(geom.density()); }

inline double integrate_with_density(const Geometry& geom, const ScalarField& f) {
  double sum = 0.0;
  for (std::size_t p = 0; p < geom.points(); ++p) sum += f[p] * geom.density()[p];
  return sum * geom.grid().cell_volume();
}

/// g̃^r_s(A, B) = ∫ g^r_s(A, B) vol(g).
inline double integrated_inner(const Geometry& geom, const TensorField& a, const TensorField& b) {
  return integrate_with_density(geom, pointwise_inner(geom, a, b));
}

inline double integrated_inner(const Geometry& geom, const SymField& a, const SymField& b) {
  return integrate_with_density(geom, pointwise_inner(geom, a, b));
}

/// ½ Tr(g^{-1} m) vol(g).
inline ScalarField d_volume_density(const Geometry& geom, const SymField& m) {
  ScalarField out = trace_metric(geom, m);
  for (std::size_t p = 0; p < geom.points(); ++p) out[p] *= 0.5 * geom.density()[p];
  return out;
}

// ---------------------------------------------------------------------------
// Curvature

struct Curvature {
  TensorField riemann;  ///< R^i_{jkl}, R(∂_k, ∂_l)∂_j = R^i_{jkl} ∂_i
  SymField ricci;
  ScalarField scal;
};

inline Curvature curvature(const Geometry& geom) {
  const Grid& grid = geom.grid();
  const int n = grid.dim;
  const std::size_t np = grid.size();
  const TensorField& gam = geom.christoffel();
  std::vector<TensorField> dgam;
  for (int k = 0; k < n; ++k) dgam.push_back(partial_derivative(gam, k));
  auto G = [&](int i, int j, int k) { return gam.component((i * n + j) * n + k); };

  Curvature out{TensorField(grid, {Index::up, Index::down, Index::down, Index::down}), SymField(grid),
                ScalarField(grid)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double* r = out.riemann.component(((i * n + j) * n + k) * n + l);
          const double* a = dgam[k].component((i * n + l) * n + j);
          const double* b = dgam[l].component((i * n + k) * n + j);
          for (std::size_t p = 0; p < np; ++p) r[p] = a[p] - b[p];
          for (int m = 0; m < n; ++m) {
            const double *x = G(i, k, m), *y = G(m, l, j), *u = G(i, l, m), *v = G(m, k, j);
            for (std::size_t p = 0; p < np; ++p) r[p] += x[p] * y[p] - u[p] * v[p];
          }
        }
  // Ricci(X, Y) = trace of Z -> R(Z, X)Y, i.e. Ric_{ab} = R^k_{bka}
  TensorField ric(grid, {Index::down, Index::down});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double* o = ric.component(a * n + b);
      for (int k = 0; k < n; ++k) {
        const double* r = out.riemann.component(((k * n + b) * n + k) * n + a);
        for (std::size_t p = 0; p < np; ++p) o[p] += r[p];
      }
    }
  out.ricci = SymField::symmetrize(ric);
  out.scal = trace_metric(geom, out.ricci);
  return out;
}

/// D_{(g,m)} Scal = Δ(Tr(g^{-1}m)) + ∇*(∇*(m)) - g^0_2(Ricci, m).
inline ScalarField d_scal(const Geometry& geom, const Curvature& curv, const SymField& m) {
  ScalarField out = bochner_laplacian(geom, trace_metric(geom, m));
  const ScalarField divdiv = nabla_star(geom, nabla_star(geom, m.to_tensor())).to_scalar();
  const ScalarField ric = pointwise_inner(geom, curv.ricci, m);
  for (std::size_t p = 0; p < geom.points(); ++p) out[p] += divdiv[p] - ric[p];
  return out;
}

inline ScalarField d_scal(const Geometry& geom, const SymField& m) { return d_scal(geom, curvature(geom), m); }

// ---------------------------------------------------------------------------
// Variation of the connection

/// N^1_0(m)^i_{jk} = ½ g^{il}((∇m)_{jkl} + (∇m)_{kjl} - (∇m)_{ljk}).
inline TensorField n10(const Geometry& geom, const SymField& m) {
  const int n = geom.dim();
  const std::size_t np = geom.points();
  const TensorField dm = covariant_derivative(geom, m);
  auto D = [&](int a, int b, int c) { return dm.component((a * n + b) * n + c); };
  TensorField out(geom.grid(), {Index::up, Index::down, Index::down});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double* o = out.component((i * n + j) * n + k);
        for (int l = 0; l < n; ++l) {
          const double* gi = geom.inverse().component(SymField::slot(i, l, n));
          const double *x = D(j, k, l), *y = D(k, j, l), *z = D(l, j, k);
          for (std::size_t p = 0; p < np; ++p) o[p] += 0.5 * gi[p] * (x[p] + y[p] - z[p]);
        }
      }
  return out;
}

/// (N^0_1)^i_{jk} = -(N^1_0)^i_{kj}.
inline TensorField n01_from(const TensorField& n10_field) {
  const int n = n10_field.dim();
  TensorField out(n10_field.grid(), n10_field.slots());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double* o = out.component((i * n + j) * n + k);
        const double* in = n10_field.component((i * n + k) * n + j);
        for (std::size_t p = 0; p < out.points(); ++p) o[p] = -in[p];
      }
  return out;
}

struct ConnectionVariation {
  TensorField up;    ///< N^1_0(m)
  TensorField down;  ///< N^0_1(m)
};

inline ConnectionVariation connection_variation(const Geometry& geom, const SymField& m) {
  TensorField up = n10(geom, m);
  TensorField down = n01_from(up);
  return {std::move(up), std::move(down)};
}

/// N^r_s(m) T, the derivative of ∇T in g along m; derivative slot prepended.
inline TensorField n_apply(const ConnectionVariation& nv, const TensorField& t) {
  return derivation_sum(nv.up, nv.down, t);
}

inline TensorField n_apply(const Geometry& geom, const SymField& m, const TensorField& t) {
  return n_apply(connection_variation(geom, m), t);
}

/// Argument rotation τ(m̃)(X, Y, Z) = m̃(Z, X, Y) of a rank-3 tensor.
inline TensorField rotate_arguments(const TensorField& mt) {
  const int n = mt.dim();
  TensorField out(mt.grid(), mt.slots());
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        const double* in = mt.component((z * n + x) * n + y);
        std::copy_n(in, mt.points(), out.component((x * n + y) * n + z));
      }
  return out;
}

/// Total symbol of N^0_q evaluated on m̃ ∈ Γ(T*M ⊗ S²T*M) and applied to h:
///   σ(m̃)(h)(X_0..X_q) = -½ Σ_j h(X_1,..,(Σ_i (-1)^i τ^i(m̃)(X_0, X_j, ·))^♯,..,X_q).
inline TensorField sigma_n_apply(const Geometry& geom, const TensorField& mt, const TensorField& h) {
  if (mt.rank() != 3) throw Error("sigma_n_apply: m̃ must have rank 3");
  for (Index s : h.slots())
    if (s != Index::down) throw Error("sigma_n_apply: h must be covariant");
  const TensorField t1 = rotate_arguments(mt);
  const TensorField t2 = rotate_arguments(t1);
  TensorField alternating = mt - t1 + t2;
  // V^l_{x y}: raise the free argument
  const TensorField v = transform_slot(alternating, 2, geom.inverse(), Index::up);
  const int n = geom.dim(), q = h.rank();
  std::vector<Index> slots(q + 1, Index::down);
  TensorField out(geom.grid(), slots);
  const std::size_t np = geom.points();
  for (std::size_t c = 0; c < out.components(); ++c) {
    const Digits d = component_digits(c, q + 1, n);
    double* o = out.component(c);
    for (int j = 1; j <= q; ++j) {
      Digits hd{};
      for (int s = 0; s < q; ++s) hd[s] = d[s + 1];
      for (int l = 0; l < n; ++l) {
        hd[j - 1] = l;
        const double* hv = h.component(component_index(hd, q, n));
        const double* vv = v.component((d[0] * n + d[j]) * n + l);
        for (std::size_t p = 0; p < np; ++p) o[p] -= 0.5 * vv[p] * hv[p];
      }
    }
  }
  return out;
}

/// Adjoint of m ↦ N^0_q(m)h with respect to g̃: the pointwise adjoint of
/// m̃ ↦ σ(N^0_q)(m̃)h is assembled from the coordinate basis of (0,3)
/// tensors, projected onto tensors symmetric in the last two slots, and
/// then ∇* is applied.
inline SymField n_adjoint(const Geometry& geom, const TensorField& h, const TensorField& k) {
  const int n = geom.dim();
  if (k.rank() != h.rank() + 1) throw Error("n_adjoint: k must have rank q+1");
  const std::size_t basis = ipow(n, 3);
  TensorField coeff(geom.grid(), {Index::up, Index::up, Index::up});
  for (std::size_t c = 0; c < basis; ++c) {
    TensorField e(geom.grid(), {Index::down, Index::down, Index::down});
    std::fill_n(e.component(c), e.points(), 1.0);
    const ScalarField pairing = pointwise_inner(geom, sigma_n_apply(geom, e, h), k);
    std::copy(pairing.values.begin(), pairing.values.end(), coeff.component(c));
  }
  TensorField w = lower_all(geom, coeff);
  TensorField sym(w.grid(), w.slots());
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        const double* a = w.component((x * n + y) * n + z);
        const double* b = w.component((x * n + z) * n + y);
        double* o = sym.component((x * n + y) * n + z);
        for (std::size_t p = 0; p < w.points(); ++p) o[p] = 0.5 * (a[p] + b[p]);
      }
  return SymField::symmetrize(nabla_star(geom, sym));
}

/// D_{(g,m)} Δh = Tr(g^{-1} m g^{-1} ∇²h) - Tr^g(N(m)∇h) - Tr^g(∇(N(m)h)).
inline TensorField d_laplacian(const Geometry& geom, const SymField& m, const TensorField& h) {
  const ConnectionVariation nv = connection_variation(geom, m);
  const TensorField dh = covariant_derivative(geom, h);
  const TensorField ddh = covariant_derivative(geom, dh);
  TensorField out = trace_with(ddh, raise_both(geom, m));
  out -= trace_g(geom, n_apply(nv, dh));
  out -= trace_g(geom, covariant_derivative(geom, n_apply(nv, h)));
  return out;
}

inline SymField d_laplacian(const Geometry& geom, const SymField& m, const SymField& h) {
  return SymField::symmetrize(d_laplacian(geom, m, h.to_tensor()));
}

/// ζ_X(g) = 𝓛_X g = 2 Sym ∇(g(X)).
inline SymField fundamental_vector_field(const Geometry& geom, const TensorField& x) {
  if (x.rank() != 1 || x.slot(0) != Index::up) throw Error("fundamental_vector_field: X must be a vector field");
  const TensorField lowered = transform_slot(x, 0, geom.metric(), Index::down);
  SymField out = SymField::symmetrize(covariant_derivative(geom, lowered));
  out *= 2.0;
  return out;
}

}  // namespace gpmetric
