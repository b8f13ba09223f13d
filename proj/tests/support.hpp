// Shared helpers for the unit tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gpmetric/tensor_calculus.hpp"

namespace testing_support {

using namespace gpmetric;
constexpr double pi = std::numbers::pi;

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// ‖a − b‖∞ / ‖b‖∞.
inline double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  return max_abs_diff(a, b) / std::max(max_abs(b), 1e-300);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Central difference of a field-valued map of g along m.
template <class F>
std::vector<double> fd_in_metric(F&& f, const SymField& g, const SymField& m, double eps) {
  SymField gp = g, gm = g;
  gp.axpy(eps, m);
  gm.axpy(-eps, m);
  std::vector<double> a = f(gp), b = f(gm);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] - b[i]) / (2.0 * eps);
  return a;
}

/// Richardson-combined central difference (eliminates the ε² term).
template <class F>
std::vector<double> fd_richardson(F&& f, const SymField& g, const SymField& m, double eps) {
  const auto coarse = fd_in_metric(f, g, m, eps);
  const auto fine = fd_in_metric(f, g, m, eps / 2.0);
  std::vector<double> out(coarse.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

/// e^{2φ} δ on a 2-torus.
template <class Phi>
SymField conformal_metric(const Grid& grid, Phi&& phi) {
  SymField g(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double w = std::exp(2.0 * phi(grid.coordinate(p, 0), grid.coordinate(p, 1)));
    g(0, 0, p) = w;
    g(1, 1, p) = w;
  }
  return g;
}

inline TensorField random_tensor(const Grid& grid, std::vector<Index> slots, std::uint64_t seed, double amp = 0.5) {
  TensorField t(grid, slots);
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < t.components(); ++c) {
    const auto v = detail::random_trig_polynomial(grid, rng, amp, 2, true);
    std::copy(v.begin(), v.end(), t.component(c));
  }
  return t;
}

}  // namespace testing_support
