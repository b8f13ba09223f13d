// Exponential map of G^P and its local inverse by Gauss-Newton shooting.
#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "gpmetric/geodesic.hpp"
#include "gpmetric/krylov.hpp"

namespace gpmetric {

struct ExpOptions {
  double dt = 1e-2;
  Scheme scheme = Scheme::rk4;
  double spd_floor = 1e-6;
};

/// Endpoint g(1) of the geodesic with g(0) = g0, g_t(0) = u0.
inline SymField exp_map(const OperatorSpec& P, const SymField& g0, const SymField& u0, const ExpOptions& opt = {}) {
  IntegratorOptions io;
  io.dt = opt.dt;
  io.T = 1.0;
  io.scheme = opt.scheme;
  io.spd_floor = opt.spd_floor;
  io.snapshot_every = std::numeric_limits<int>::max();
  const Trajectory traj = integrate_geodesic(P, g0, u0, io);
  if (traj.boundary_reached || std::abs(traj.final_state().t - 1.0) > 1e-12)
    throw Error("exp_map: boundary reached before t = 1");
  return traj.final_state().g;
}

/// Flat-background norm √(Σ_p Σ_ij m_ij² · cell volume), fixed along the iteration.
inline double background_norm(const SymField& m) {
  const int n = m.grid().dim;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double* c = m.component(SymField::slot(i, j, n));
      for (std::size_t p = 0; p < m.points(); ++p) s += c[p] * c[p];
    }
  return std::sqrt(s * m.grid().cell_volume());
}

inline double background_dot(const Grid& grid, const Vector& a, const Vector& b) {
  const int n = grid.dim;
  const std::size_t np = grid.size();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t off = SymField::slot(i, j, n) * np;
      for (std::size_t p = 0; p < np; ++p) s += a[off + p] * b[off + p];
    }
  return s * grid.cell_volume();
}

struct LogOptions {
  ExpOptions exp;
  double fd_eps = 1e-5;
  double rel_tol = 1e-8;
  int max_iterations = 50;
  int max_line_halvings = 20;
  double krylov_tol = 1e-4;
  int krylov_max_iter = 40;
};

struct LogResult {
  SymField u;
  bool converged = false;
  int iterations = 0;
  /// ‖exp(g0,u) − g1‖ / ‖g1 − g0‖ in the background norm.
  double final_residual = 0.0;
  std::string message;
};

/// Shooting solve of exp(g0, u) = g1 without throwing on non-convergence.
inline LogResult log_map_report(const OperatorSpec& P, const SymField& g0, const SymField& g1,
                                const LogOptions& opt = {}) {
  if (!(g0.grid() == g1.grid())) throw Error("log_map: g0 and g1 live on different grids");
  const Grid& grid = g0.grid();
  LogResult out;
  out.u = g1 - g0;
  const double scale = background_norm(out.u);
  if (scale == 0.0) {
    out.converged = true;
    return out;
  }
  auto dot = [&](const Vector& a, const Vector& b) { return background_dot(grid, a, b); };
  auto shoot = [&](const SymField& u) { return exp_map(P, g0, u, opt.exp); };

  // the straight-line guess g1 − g0 can overshoot the SPD cone; shrink it
  // until the shot lands
  SymField F;
  for (int k = 0;; ++k) {
    try {
      F = shoot(out.u) - g1;
      break;
    } catch (const Error&) {
      if (k >= opt.max_line_halvings) {
        out.message = "no initial shot stays inside the SPD cone";
        return out;
      }
      out.u *= 0.5;
    }
  }
  double res = background_norm(F) / scale;
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.final_residual = res;
    out.iterations = it;
    if (res <= opt.rel_tol) {
      out.converged = true;
      return out;
    }
    // J v by central differences of the shot along the unit direction of v
    auto jvp = [&](const Vector& v) {
      const double nv = std::sqrt(dot(v, v));
      if (nv == 0.0) return Vector(v.size(), 0.0);
      SymField dir = detail::from_vector(grid, v);
      dir *= opt.fd_eps / nv;
      SymField d = shoot(out.u + dir) - shoot(out.u - dir);
      d *= nv / (2.0 * opt.fd_eps);
      return d.data();
    };
    Vector rhs = (-1.0 * F).data();
    Vector step(rhs.size(), 0.0);
    gmres(jvp, dot, rhs, step, opt.krylov_tol, opt.krylov_max_iter);
    const SymField du = detail::from_vector(grid, step);

    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k <= opt.max_line_halvings; ++k, lambda *= 0.5) {
      SymField trial = out.u;
      trial.axpy(lambda, du);
      try {
        SymField Ft = shoot(trial) - g1;
        const double rt = background_norm(Ft) / scale;
        if (rt < res) {
          out.u = std::move(trial);
          F = std::move(Ft);
          res = rt;
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // trial shot left the SPD cone: shrink the step
      }
    }
    if (!accepted) {
      out.message = "line search failed to reduce the shooting mismatch";
      out.iterations = it + 1;
      out.final_residual = res;
      return out;
    }
  }
  out.iterations = opt.max_iterations;
  out.final_residual = res;
  out.converged = res <= opt.rel_tol;
  if (!out.converged) out.message = "maximum number of shooting iterations exceeded";
  return out;
}

/// u with ‖exp(g0,u) − g1‖ ≤ rel_tol·‖g1 − g0‖; throws when shooting fails.
inline SymField log_map(const OperatorSpec& P, const SymField& g0, const SymField& g1, const LogOptions& opt = {}) {
  LogResult r = log_map_report(P, g0, g1, opt);
  if (!r.converged) throw Error("log_map: " + r.message);
  return std::move(r.u);
}

}  // namespace gpmetric
