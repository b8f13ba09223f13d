// Periodic uniform grids on flat tori, field storage, finite differences and
// quadrature.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gpmetric {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic lattice over T^n, n in {1, 2}. Points are stored
/// row-major with the last axis fastest.
struct Grid {
  int dim = 1;
  std::array<int, 2> shape{8, 1};
  std::array<double, 2> lengths{1.0, 1.0};
  std::array<double, 2> spacing{0.125, 1.0};

  std::size_t size() const {
    return static_cast<std::size_t>(shape[0]) * static_cast<std::size_t>(dim == 2 ? shape[1] : 1);
  }
  double cell_volume() const { return dim == 2 ? spacing[0] * spacing[1] : spacing[0]; }
  double total_length_volume() const { return dim == 2 ? lengths[0] * lengths[1] : lengths[0]; }

  /// Integer lattice index of point p along axis.
  int index(std::size_t p, int axis) const {
    if (dim == 1) return static_cast<int>(p);
    return axis == 0 ? static_cast<int>(p / shape[1]) : static_cast<int>(p % shape[1]);
  }
  double coordinate(std::size_t p, int axis) const { return index(p, axis) * spacing[axis]; }

  std::size_t point(int i0, int i1 = 0) const {
    auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
    if (dim == 1) return static_cast<std::size_t>(wrap(i0, shape[0]));
    return static_cast<std::size_t>(wrap(i0, shape[0])) * shape[1] + wrap(i1, shape[1]);
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim == b.dim && a.shape == b.shape && a.lengths == b.lengths;
  }
};

inline Grid build_grid(int dim, std::span<const int> shape, std::span<const double> lengths) {
  if (dim != 1 && dim != 2) throw Error("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (shape.size() != static_cast<std::size_t>(dim) || lengths.size() != static_cast<std::size_t>(dim))
    throw Error("grid shape/lengths must have one entry per axis");
  Grid grid;
  grid.dim = dim;
  for (int a = 0; a < dim; ++a) {
    if (shape[a] < 8 || shape[a] % 2 != 0)
      throw Error("grid point count must be even and >= 8, got " + std::to_string(shape[a]) +
                  " on axis " + std::to_string(a));
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
      throw Error("grid period must be positive on axis " + std::to_string(a));
    grid.shape[a] = shape[a];
    grid.lengths[a] = lengths[a];
    grid.spacing[a] = lengths[a] / shape[a];
  }
  return grid;
}

inline Grid build_grid(int dim, std::initializer_list<int> shape, std::initializer_list<double> lengths) {
  return build_grid(dim, std::span<const int>(shape.begin(), shape.size()),
                    std::span<const double>(lengths.begin(), lengths.size()));
}

/// Square grid helper: N points per axis, period L per axis.
inline Grid square_grid(int dim, int points, double length) {
  std::array<int, 2> s{points, points};
  std::array<double, 2> l{length, length};
  return build_grid(dim, std::span<const int>(s.data(), dim), std::span<const double>(l.data(), dim));
}

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  double& operator[](std::size_t p) { return values[p]; }
  double operator[](std::size_t p) const { return values[p]; }
};

enum class Index : std::uint8_t { up, down };

inline std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

/// Multi-index of a tensor component; slot 0 is the most significant digit.
using Digits = std::array<int, 8>;

inline Digits component_digits(std::size_t c, int rank, int n) {
  Digits d{};
  for (int s = rank - 1; s >= 0; --s) {
    d[s] = static_cast<int>(c % n);
    c /= n;
  }
  return d;
}

inline std::size_t component_index(const Digits& d, int rank, int n) {
  std::size_t c = 0;
  for (int s = 0; s < rank; ++s) c = c * n + d[s];
  return c;
}

/// Tensor field of arbitrary type. Slot variance is stored per slot; the slot
/// added by a covariant derivative is always slot 0. Storage is
/// component-major: data[c * points + p].
class TensorField {
 public:
  TensorField() = default;
  TensorField(const Grid& grid, std::vector<Index> slots)
      : grid_(grid), slots_(std::move(slots)),
        data_(ipow(grid.dim, static_cast<int>(slots_.size())) * grid.size(), 0.0) {
    if (slots_.size() > 8) throw Error("tensor rank above 8 is not supported");
  }

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim; }
  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<Index>& slots() const { return slots_; }
  Index slot(int s) const { return slots_[s]; }
  int contravariant_rank() const { return static_cast<int>(std::count(slots_.begin(), slots_.end(), Index::up)); }
  int covariant_rank() const { return rank() - contravariant_rank(); }
  std::size_t components() const { return ipow(grid_.dim, rank()); }
  std::size_t points() const { return grid_.size(); }

  double* component(std::size_t c) { return data_.data() + c * points(); }
  const double* component(std::size_t c) const { return data_.data() + c * points(); }
  double& operator()(std::size_t c, std::size_t p) { return data_[c * points() + p]; }
  double operator()(std::size_t c, std::size_t p) const { return data_[c * points() + p]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_type(const TensorField& o) const { return grid_ == o.grid_ && slots_ == o.slots_; }

  TensorField& operator+=(const TensorField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  TensorField& operator-=(const TensorField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  TensorField& operator*=(double a) {
    for (double& v : data_) v *= a;
    return *this;
  }
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(double s, TensorField a) { return a *= s; }

  static TensorField from_scalar(const ScalarField& f) {
    TensorField t(f.grid, {});
    t.data_ = f.values;
    return t;
  }
  ScalarField to_scalar() const {
    if (rank() != 0) throw Error("to_scalar: tensor has rank " + std::to_string(rank()));
    ScalarField f(grid_);
    f.values = data_;
    return f;
  }

 private:
  void check_same(const TensorField& o) const {
    if (!same_type(o)) throw Error("tensor type mismatch in arithmetic");
  }

  Grid grid_;
  std::vector<Index> slots_;
  std::vector<double> data_;
};

/// Symmetric (0,2) tensor field storing only independent components:
/// (00, 01, 11) for n = 2 and (00) for n = 1.
class SymField {
 public:
  SymField() = default;
  explicit SymField(const Grid& grid) : grid_(grid), data_(count(grid.dim) * grid.size(), 0.0) {}

  static int count(int n) { return n * (n + 1) / 2; }
  static int slot(int i, int j, int n) {
    if (n == 1) return 0;
    return i + j;  // 00 -> 0, 01/10 -> 1, 11 -> 2
  }

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim; }
  std::size_t points() const { return grid_.size(); }
  int independent() const { return count(grid_.dim); }

  double& operator()(int i, int j, std::size_t p) { return data_[slot(i, j, dim()) * points() + p]; }
  double operator()(int i, int j, std::size_t p) const { return data_[slot(i, j, dim()) * points() + p]; }
  double* component(int s) { return data_.data() + s * points(); }
  const double* component(int s) const { return data_.data() + s * points(); }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  SymField& operator+=(const SymField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SymField& operator-=(const SymField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SymField& operator*=(double a) {
    for (double& v : data_) v *= a;
    return *this;
  }
  /// this += a * x
  SymField& axpy(double a, const SymField& x) {
    check_same(x);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
    return *this;
  }
  friend SymField operator+(SymField a, const SymField& b) { return a += b; }
  friend SymField operator-(SymField a, const SymField& b) { return a -= b; }
  friend SymField operator*(double s, SymField a) { return a *= s; }

  static SymField identity(const Grid& grid) {
    SymField d(grid);
    for (int i = 0; i < grid.dim; ++i) std::fill_n(d.component(slot(i, i, grid.dim)), grid.size(), 1.0);
    return d;
  }
  static SymField constant(const Grid& grid, std::span<const double> values) {
    SymField d(grid);
    if (values.size() != static_cast<std::size_t>(d.independent())) throw Error("constant: wrong component count");
    for (int s = 0; s < d.independent(); ++s) std::fill_n(d.component(s), grid.size(), values[s]);
    return d;
  }

  /// Scalar multiple of this field by a pointwise function.
  SymField scaled(const ScalarField& f) const {
    SymField r = *this;
    for (int s = 0; s < independent(); ++s)
      for (std::size_t p = 0; p < points(); ++p) r.component(s)[p] *= f.values[p];
    return r;
  }

  TensorField to_tensor() const {
    TensorField t(grid_, {Index::down, Index::down});
    const int n = dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) std::copy_n(component(slot(i, j, n)), points(), t.component(i * n + j));
    return t;
  }

  /// Symmetric part of a (0,2) or (2,0) tensor.
  static SymField symmetrize(const TensorField& t) {
    if (t.rank() != 2) throw Error("symmetrize: expected a rank-2 tensor");
    SymField s(t.grid());
    const int n = t.dim();
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double* out = s.component(slot(i, j, n));
        const double* a = t.component(i * n + j);
        const double* b = t.component(j * n + i);
        for (std::size_t p = 0; p < s.points(); ++p) out[p] = 0.5 * (a[p] + b[p]);
      }
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  void check_same(const SymField& o) const {
    if (!(grid_ == o.grid_)) throw Error("symmetric field grid mismatch");
  }

  Grid grid_;
  std::vector<double> data_;
};

/// Smallest eigenvalue of the pointwise matrix at p.
inline double min_eigenvalue_at(const SymField& g, std::size_t p) {
  if (g.dim() == 1) return g(0, 0, p);
  const double a = g(0, 0, p), b = g(0, 1, p), c = g(1, 1, p);
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return mean - rad;
}

inline double max_eigenvalue_at(const SymField& g, std::size_t p) {
  if (g.dim() == 1) return g(0, 0, p);
  const double a = g(0, 0, p), b = g(0, 1, p), c = g(1, 1, p);
  return 0.5 * (a + c) + std::hypot(0.5 * (a - c), b);
}

inline double min_eigenvalue(const SymField& g) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < g.points(); ++p) m = std::min(m, min_eigenvalue_at(g, p));
  return m;
}

/// A symmetric field that is pointwise positive definite.
class MetricField {
 public:
  explicit MetricField(SymField g) : g_(std::move(g)) {
    for (std::size_t p = 0; p < g_.points(); ++p) {
      const double lo = min_eigenvalue_at(g_, p);
      if (!(lo > 0.0) || !std::isfinite(lo))
        throw Error("metric is not positive definite at point " + std::to_string(p) +
                    " (min eigenvalue " + std::to_string(lo) + ")");
    }
  }
  const SymField& values() const { return g_; }
  operator const SymField&() const { return g_; }
  const Grid& grid() const { return g_.grid(); }

 private:
  SymField g_;
};

// ---------------------------------------------------------------------------
// Finite differences and quadrature

/// Fourth-order central difference along one axis with periodic wrap.
inline void differentiate_component(const Grid& grid, int axis, const double* in, double* out) {
  const double w = 1.0 / (12.0 * grid.spacing[axis]);
  if (grid.dim == 1) {
    const int n = grid.shape[0];
    for (int i = 0; i < n; ++i) {
      const int ip1 = (i + 1) % n, ip2 = (i + 2) % n, im1 = (i - 1 + n) % n, im2 = (i - 2 + n) % n;
      out[i] = w * ((in[im2] - in[ip2]) + 8.0 * (in[ip1] - in[im1]));
    }
    return;
  }
  const int n0 = grid.shape[0], n1 = grid.shape[1];
  if (axis == 0) {
    for (int i = 0; i < n0; ++i) {
      const double* p1 = in + static_cast<std::size_t>((i + 1) % n0) * n1;
      const double* p2 = in + static_cast<std::size_t>((i + 2) % n0) * n1;
      const double* m1 = in + static_cast<std::size_t>((i - 1 + n0) % n0) * n1;
      const double* m2 = in + static_cast<std::size_t>((i - 2 + n0) % n0) * n1;
      double* o = out + static_cast<std::size_t>(i) * n1;
      for (int j = 0; j < n1; ++j) o[j] = w * ((m2[j] - p2[j]) + 8.0 * (p1[j] - m1[j]));
    }
  } else {
    for (int i = 0; i < n0; ++i) {
      const double* row = in + static_cast<std::size_t>(i) * n1;
      double* o = out + static_cast<std::size_t>(i) * n1;
      for (int j = 0; j < n1; ++j) {
        const int jp1 = (j + 1) % n1, jp2 = (j + 2) % n1, jm1 = (j - 1 + n1) % n1, jm2 = (j - 2 + n1) % n1;
        o[j] = w * ((row[jm2] - row[jp2]) + 8.0 * (row[jp1] - row[jm1]));
      }
    }
  }
}

inline TensorField partial_derivative(const TensorField& field, int axis) {
  if (axis < 0 || axis >= field.dim())
    throw Error("partial_derivative: axis " + std::to_string(axis) + " out of range");
  TensorField out(field.grid(), field.slots());
  for (std::size_t c = 0; c < field.components(); ++c)
    differentiate_component(field.grid(), axis, field.component(c), out.component(c));
  return out;
}

inline ScalarField partial_derivative(const ScalarField& f, int axis) {
  return partial_derivative(TensorField::from_scalar(f), axis).to_scalar();
}

/// Rectangle rule; the integrand is expected to carry its density factor.
/// Summation runs in storage order so the result is reproducible.
inline double integrate_density(const Grid& grid, std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.cell_volume();
}

inline double integrate_density(const ScalarField& s) { return integrate_density(s.grid, s.values); }

// ---------------------------------------------------------------------------
// Deterministic smooth test data

namespace detail {

/// Uniform double in [-1, 1) from the raw 64-bit engine output; independent of
/// the standard library's distribution implementation.
inline double symmetric_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

struct Mode {
  int k0, k1;
};

inline std::vector<Mode> fourier_modes(int dim, int max_mode, bool with_constant) {
  std::vector<Mode> modes;
  if (with_constant) modes.push_back({0, 0});
  if (dim == 1) {
    for (int k = 1; k <= max_mode; ++k) modes.push_back({k, 0});
    return modes;
  }
  for (int k0 = 0; k0 <= max_mode; ++k0)
    for (int k1 = -max_mode; k1 <= max_mode; ++k1)
      if (k0 > 0 || k1 > 0) modes.push_back({k0, k1});
  return modes;
}

/// Trigonometric polynomial with sup norm at most `amplitude`.
inline std::vector<double> random_trig_polynomial(const Grid& grid, std::mt19937_64& rng, double amplitude,
                                                  int max_mode, bool with_constant) {
  const auto modes = fourier_modes(grid.dim, max_mode, with_constant);
  std::vector<double> a(modes.size()), b(modes.size());
  double total = 0.0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    a[m] = symmetric_unit(rng);
    b[m] = (modes[m].k0 == 0 && modes[m].k1 == 0) ? 0.0 : symmetric_unit(rng);
    total += std::abs(a[m]) + std::abs(b[m]);
  }
  const double scale = total > 0.0 ? amplitude / total : 0.0;
  std::vector<double> out(grid.size(), 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x0 = two_pi * grid.coordinate(p, 0) / grid.lengths[0];
    const double x1 = grid.dim == 2 ? two_pi * grid.coordinate(p, 1) / grid.lengths[1] : 0.0;
    double v = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const double phase = modes[m].k0 * x0 + modes[m].k1 * x1;
      v += a[m] * std::cos(phase) + b[m] * std::sin(phase);
    }
    out[p] = scale * v;
  }
  return out;
}

}  // namespace detail

struct RandomFields {
  MetricField metric;
  SymField tangent;
};

/// g = identity + smooth symmetric perturbation, h = independent smooth
/// symmetric field. The underlying trigonometric coefficients depend only on
/// (seed, amplitude, max_mode), so the same continuous fields are sampled on
/// every grid.
inline RandomFields random_smooth_fields(const Grid& grid, std::uint64_t seed, double amplitude, int max_mode,
                                         bool zero_mean_tangent = false) {
  if (!(amplitude >= 0.0 && amplitude <= 0.5)) throw Error("random_smooth_fields: amplitude must lie in [0, 0.5]");
  for (int a = 0; a < grid.dim; ++a)
    if (max_mode < 1 || max_mode > grid.shape[a] / 4)
      throw Error("random_smooth_fields: max_mode must lie in [1, N/4]");
  std::mt19937_64 rng(seed);
  SymField g = SymField::identity(grid);
  SymField h(grid);
  const int comps = SymField::count(grid.dim);
  for (int s = 0; s < comps; ++s) {
    const auto v = detail::random_trig_polynomial(grid, rng, amplitude, max_mode, false);
    for (std::size_t p = 0; p < grid.size(); ++p) g.component(s)[p] += v[p];
  }
  for (int s = 0; s < comps; ++s) {
    const auto v = detail::random_trig_polynomial(grid, rng, amplitude, max_mode, !zero_mean_tangent);
    std::copy(v.begin(), v.end(), h.component(s));
  }
  const double lo = min_eigenvalue(g);
  if (!(lo > 0.1))
    throw Error("random_smooth_fields: generated metric has min eigenvalue " + std::to_string(lo) + " <= 0.1");
  return {MetricField(std::move(g)), std::move(h)};
}

/// Samples a function of the physical coordinates onto the grid.
template <class F>
ScalarField sample(const Grid& grid, F&& f) {
  ScalarField s(grid);
  for (std::size_t p = 0; p < grid.size(); ++p)
    s[p] = grid.dim == 1 ? f(grid.coordinate(p, 0), 0.0) : f(grid.coordinate(p, 0), grid.coordinate(p, 1));
  return s;
}

}  // namespace gpmetric
