// Geodesic equation of G^P in the momentum form (g, h = P_g g_t), RK4 time
// integration and conservation monitors.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpmetric/operators.hpp"

namespace gpmetric {

/// K_g(h, m): D_{(g,m)}G^P(h,k) = G^P(K(h,m), k).
inline SymField gradient_K(const OperatorSpec& P, const Geometry& geom, const SymField& h, const SymField& m) {
  const SymField ph = op_apply(P, geom, h);
  SymField rhs = op_derivative(P, geom, m, h);
  rhs -= symmetric_product(geom, m, ph);
  ScalarField half_trace = trace_metric(geom, m);
  for (double& v : half_trace.values) v *= 0.5;
  rhs += ph.scaled(half_trace);
  return op_solve(P, geom, rhs);
}

/// H_g(h, k): D_{(g,m)}G^P(h,k) = G^P(m, H(h,k)).
inline SymField gradient_H(const OperatorSpec& P, const Geometry& geom, const SymField& h, const SymField& k) {
  const SymField ph = op_apply(P, geom, h);
  SymField rhs = op_derivative_adjoint(P, geom, h, k);
  rhs -= symmetric_product(geom, ph, k);
  ScalarField half_inner = pointwise_inner(geom, ph, k);
  for (double& v : half_inner.values) v *= 0.5;
  rhs += geom.metric().scaled(half_inner);
  return op_solve(P, geom, rhs);
}

struct FlowValue {
  SymField dg;  ///< X₁ = P⁻¹h
  SymField dh;  ///< X₂
};

/// The first-order flow field X = (X₁, X₂) on (g, h). `velocity_guess`
/// warm-starts the Sobolev solve.
inline FlowValue flow_field(const OperatorSpec& P, const Geometry& geom, const SymField& h,
                            const SymField* velocity_guess = nullptr) {
  SymField u = op_solve(P, geom, h, velocity_guess);
  SymField x2 = 0.5 * op_derivative_adjoint(P, geom, u, u);
  ScalarField quarter = pointwise_inner(geom, h, u);
  for (double& v : quarter.values) v *= 0.25;
  x2 += geom.metric().scaled(quarter);
  x2.axpy(0.5, symmetric_product(geom, u, h));
  ScalarField half_trace = trace_metric(geom, u);
  for (double& v : half_trace.values) v *= -0.5;
  x2 += h.scaled(half_trace);
  return {std::move(u), std::move(x2)};
}

inline FlowValue flow_field(const OperatorSpec& P, const SymField& g, const SymField& h) {
  return flow_field(P, Geometry(g), h);
}

// ---------------------------------------------------------------------------
// Monitors

/// G^P(g_t, g_t) = ∫ g^0_2(h, P⁻¹h) vol(g).
inline double energy(const Geometry& geom, const SymField& h, const SymField& u) { return integrated_inner(geom, h, u); }

inline double energy(const OperatorSpec& P, const Geometry& geom, const SymField& h) {
  return energy(geom, h, op_solve(P, geom, h));
}

/// The covector density (∇*h) vol(g), stored as the product per point.
struct MomentumDensity {
  TensorField covector;  ///< ∇*h
  ScalarField density;   ///< vol(g)

  std::vector<double> product() const {
    std::vector<double> out(covector.data().size());
    const std::size_t np = density.values.size();
    for (std::size_t c = 0; c < covector.components(); ++c)
      for (std::size_t p = 0; p < np; ++p) out[c * np + p] = covector(c, p) * density[p];
    return out;
  }
};

inline MomentumDensity momentum_density(const Geometry& geom, const SymField& h) {
  return {nabla_star(geom, h.to_tensor()), geom.density()};
}

// ---------------------------------------------------------------------------
// Integration

struct GeodesicState {
  SymField g;
  SymField h;
  double t = 0.0;
};

struct MonitorRecord {
  double t = 0.0;
  double energy = 0.0;
  double energy_drift = 0.0;
  double momentum_drift = 0.0;
  double spd_margin = 0.0;
  double step_size = 0.0;
};

enum class Scheme { rk4, rk4_adaptive };

struct IntegratorOptions {
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::rk4;
  /// Minimum eigenvalue floor relative to the initial minimum eigenvalue.
  double spd_floor = 1e-6;
  /// Local error target of the step-doubling controller.
  double local_tol = 1e-8;
  /// Step halvings allowed when a step would leave the SPD cone.
  int max_halvings = 30;
  /// Snapshot stride; 0 selects ⌈T/(100 dt)⌉.
  int snapshot_every = 0;
};

struct Trajectory {
  OperatorSpec spec;
  Grid grid;
  IntegratorOptions options;
  std::vector<GeodesicState> states;
  std::vector<MonitorRecord> monitors;
  bool boundary_reached = false;
  std::string halt_reason;

  const GeodesicState& final_state() const { return states.back(); }
};

namespace detail {

struct StepResult {
  bool ok = false;
  SymField g, h;
  SymField u_end;  // velocity at the new state when available
};

inline bool all_finite(const SymField& s) {
  for (double v : s.data())
    if (!std::isfinite(v)) return false;
  return true;
}

/// One classical RK4 step; fails (ok = false) when a stage leaves the SPD
/// cone or produces nonfinite values.
inline StepResult rk4_step(const OperatorSpec& P, const SymField& g, const SymField& h, double dt, double floor_abs,
                           const SymField* guess) {
  StepResult out;
  try {
    auto stage = [&](const SymField& gs, const SymField& hs, const SymField* gu) -> std::optional<FlowValue> {
      if (!all_finite(gs) || !all_finite(hs) || !(min_eigenvalue(gs) > floor_abs)) return std::nullopt;
      return flow_field(P, Geometry(gs), hs, gu);
    };
    const auto k1 = stage(g, h, guess);
    if (!k1) return out;
    const auto k2 = stage(g + (0.5 * dt) * k1->dg, h + (0.5 * dt) * k1->dh, &k1->dg);
    if (!k2) return out;
    const auto k3 = stage(g + (0.5 * dt) * k2->dg, h + (0.5 * dt) * k2->dh, &k2->dg);
    if (!k3) return out;
    const auto k4 = stage(g + dt * k3->dg, h + dt * k3->dh, &k3->dg);
    if (!k4) return out;
    out.g = g;
    out.h = h;
    const double w1 = dt / 6.0, w2 = dt / 3.0;
    out.g.axpy(w1, k1->dg).axpy(w2, k2->dg).axpy(w2, k3->dg).axpy(w1, k4->dg);
    out.h.axpy(w1, k1->dh).axpy(w2, k2->dh).axpy(w2, k3->dh).axpy(w1, k4->dh);
    out.u_end = k4->dg;
    out.ok = all_finite(out.g) && all_finite(out.h) && min_eigenvalue(out.g) > floor_abs;
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

inline double max_abs_difference(const SymField& a, const SymField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

/// Integrates the geodesic with g(0) = g0, g_t(0) = u0 on [0, T].
inline Trajectory integrate_geodesic(const OperatorSpec& P, const SymField& g0, const SymField& u0,
                                     const IntegratorOptions& opt = {}) {
  if (!(opt.dt > 0.0) || !(opt.T >= 0.0)) throw Error("integrate_geodesic: need dt > 0 and T >= 0");
  const double lo0 = min_eigenvalue(g0);
  if (!(lo0 > 0.0)) throw Error("integrate_geodesic: initial metric is not positive definite");
  const double floor_abs = opt.spd_floor * lo0;

  Trajectory traj;
  traj.spec = P;
  traj.grid = g0.grid();
  traj.options = opt;
  const int stride = opt.snapshot_every > 0
                         ? opt.snapshot_every
                         : std::max(1, static_cast<int>(std::ceil(opt.T / (100.0 * opt.dt) - 1e-12)));

  SymField g = g0;
  SymField h = op_apply(P, Geometry(g0), u0);
  double t = 0.0;

  const Geometry geom0(g0);
  SymField u = op_solve(P, geom0, h, &u0);
  const double e0 = energy(geom0, h, u);
  const std::vector<double> mu0 = momentum_density(geom0, h).product();
  const double mu0_norm = detail::sup_norm(mu0);

  auto record = [&](const Geometry& geom, const SymField& hh, const SymField& uu, double step) {
    MonitorRecord rec;
    rec.t = t;
    rec.energy = energy(geom, hh, uu);
    rec.energy_drift = e0 > 0.0 ? std::abs(rec.energy - e0) / e0 : std::abs(rec.energy);
    const auto mu = momentum_density(geom, hh).product();
    double diff = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) diff = std::max(diff, std::abs(mu[i] - mu0[i]));
    rec.momentum_drift = mu0_norm > 0.0 ? diff / mu0_norm : diff;
    rec.spd_margin = min_eigenvalue(geom.metric()) / lo0;
    rec.step_size = step;
    traj.monitors.push_back(rec);
  };

  traj.states.push_back({g, h, t});
  record(geom0, h, u, 0.0);

  double dt = opt.dt;
  int halvings = 0;
  long step = 0;
  const double t_end = opt.T;
  while (t < t_end - 1e-14 * std::max(1.0, t_end)) {
    const double this_dt = std::min(dt, t_end - t);
    detail::StepResult res;
    double err_ratio = 0.0;
    if (opt.scheme == Scheme::rk4) {
      res = detail::rk4_step(P, g, h, this_dt, floor_abs, &u);
    } else {
      const auto full = detail::rk4_step(P, g, h, this_dt, floor_abs, &u);
      const auto half1 = full.ok ? detail::rk4_step(P, g, h, 0.5 * this_dt, floor_abs, &u) : detail::StepResult{};
      if (half1.ok) {
        res = detail::rk4_step(P, half1.g, half1.h, 0.5 * this_dt, floor_abs, &half1.u_end);
        if (res.ok) {
          const double scale = std::max({1.0, res.g.max_abs(), res.h.max_abs()});
          const double err = std::max(detail::max_abs_difference(res.g, full.g),
                                      detail::max_abs_difference(res.h, full.h)) /
                             15.0 / scale;
          err_ratio = err / opt.local_tol;
        }
      }
    }
    if (!res.ok) {
      if (++halvings > opt.max_halvings) {
        traj.boundary_reached = true;
        traj.halt_reason = "boundary reached: metric left the SPD cone within the step-halving budget";
        break;
      }
      dt = 0.5 * this_dt;
      continue;
    }
    if (opt.scheme == Scheme::rk4_adaptive && err_ratio > 1.0) {
      dt = this_dt * std::max(0.2, 0.9 * std::pow(err_ratio, -0.2));
      continue;
    }
    g = std::move(res.g);
    h = std::move(res.h);
    t += this_dt;
    ++step;
    const Geometry geom(g);
    u = op_solve(P, geom, h, &res.u_end);
    record(geom, h, u, this_dt);
    if (step % stride == 0 || t >= t_end - 1e-14 * std::max(1.0, t_end)) traj.states.push_back({g, h, t});
    if (opt.scheme == Scheme::rk4_adaptive && halvings == 0) {
      dt = this_dt * std::min(2.0, 0.9 * std::pow(std::max(err_ratio, 1e-10), -0.2));
      dt = std::min(dt, opt.dt * 64.0);
    }
  }
  if (traj.states.back().t != t) traj.states.push_back({g, h, t});
  return traj;
}

/// Composite trapezoid of √energy over the recorded monitor times.
inline double path_length(const Trajectory& traj) {
  if (traj.monitors.size() < 2) throw Error("path_length: need at least two states");
  double len = 0.0;
  for (std::size_t i = 1; i < traj.monitors.size(); ++i) {
    const double dt = traj.monitors[i].t - traj.monitors[i - 1].t;
    len += 0.5 * dt * (std::sqrt(std::max(0.0, traj.monitors[i].energy)) +
                       std::sqrt(std::max(0.0, traj.monitors[i - 1].energy)));
  }
  return len;
}

inline double max_energy_drift(const Trajectory& traj) {
  double m = 0.0;
  for (const auto& r : traj.monitors) m = std::max(m, r.energy_drift);
  return m;
}

inline double max_momentum_drift(const Trajectory& traj) {
  double m = 0.0;
  for (const auto& r : traj.monitors) m = std::max(m, r.momentum_drift);
  return m;
}

}  // namespace gpmetric
