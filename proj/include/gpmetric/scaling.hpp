// Pure-scaling geodesics r(t)·g0: the profile functions Ψ, f, the scalar
// radial ODE, closed forms, and lengths of shrinking paths.
#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_spline.h>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "gpmetric/geodesic.hpp"

namespace gpmetric {

namespace detail {

/// Natural cubic spline y(x) owning its GSL state.
class Spline {
 public:
  Spline(const std::vector<double>& x, const std::vector<double>& y)
      : spline_(gsl_spline_alloc(gsl_interp_cspline, x.size()), gsl_spline_free),
        acc_(gsl_interp_accel_alloc(), gsl_interp_accel_free) {
    if (x.size() < 3) throw Error("spline: need at least three samples");
    if (gsl_spline_init(spline_.get(), x.data(), y.data(), x.size()) != GSL_SUCCESS)
      throw Error("spline: abscissae must be strictly increasing");
  }
  double operator()(double x) const { return gsl_spline_eval(spline_.get(), x, acc_.get()); }
  double derivative(double x) const { return gsl_spline_eval_deriv(spline_.get(), x, acc_.get()); }

 private:
  std::unique_ptr<gsl_spline, void (*)(gsl_spline*)> spline_;
  std::unique_ptr<gsl_interp_accel, void (*)(gsl_interp_accel*)> acc_;
};

struct QuadResult {
  int status = 0;
  double value = 0.0;
  double abserr = 0.0;
};

/// Adaptive QAGS on [a, b]; tolerates integrable endpoint singularities.
template <class F>
QuadResult integrate_qags(F&& f, double a, double b, double epsabs, double epsrel) {
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  std::unique_ptr<gsl_integration_workspace, void (*)(gsl_integration_workspace*)> ws(
      gsl_integration_workspace_alloc(2000), gsl_integration_workspace_free);
  gsl_function gf;
  gf.function = [](double x, void* p) { return (*static_cast<std::remove_reference_t<F>*>(p))(x); };
  gf.params = &f;
  QuadResult r;
  r.status = gsl_integration_qags(&gf, a, b, epsabs, epsrel, 2000, ws.get(), &r.value, &r.abserr);
  gsl_set_error_handler(old);
  return r;
}

}  // namespace detail

/// Ψ and f along the ray r·g0: P_{rg0}(g0) = Ψ(r)g0 and
/// ((D_{(rg0,·)}P)g0)*(g0) = f(r)g0.
struct ScalingProfile {
  enum class Provenance { analytic, extracted };

  OperatorSpec spec;
  int n = 2;
  double vol0 = 1.0;
  Provenance provenance = Provenance::analytic;
  std::vector<double> r, psi, f;
  /// Largest orthogonal residuals of the two projections (extracted only).
  double psi_residual = 0.0;
  double f_residual = 0.0;

  std::function<double(double)> psi_fn, dpsi_fn, f_fn;

  /// Both projections leave at most 1e-6 relative residual.
  bool restricts_to_ray() const { return psi_residual <= 1e-6 && f_residual <= 1e-6; }

  double psi_at(double x) const { return provenance == Provenance::analytic ? psi_fn(x) : eval(x).psi; }
  double dpsi_at(double x) const { return provenance == Provenance::analytic ? dpsi_fn(x) : eval(x).dpsi; }
  double f_at(double x) const { return provenance == Provenance::analytic ? f_fn(x) : eval(x).f; }

  /// α in Ψ(r) ~ r^α as r → 0.
  double small_r_exponent() const {
    if (provenance == Provenance::extracted) return log_psi_->derivative(std::log(r.front()));
    const double r1 = 1e-7, r2 = 1e-6;
    return std::log(psi_fn(r2) / psi_fn(r1)) / std::log(r2 / r1);
  }

  /// Splines log Ψ and q = r f / Ψ against log r. Both are exact for power
  /// laws; below the first sample Ψ continues as a power law and q as a constant.
  void build_splines() {
    std::vector<double> x(r.size()), lp(r.size()), q(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(psi[i] > 0.0)) throw Error("scaling profile: Ψ <= 0 at r = " + std::to_string(r[i]));
      x[i] = std::log(r[i]);
      lp[i] = std::log(psi[i]);
      q[i] = r[i] * f[i] / psi[i];
    }
    log_psi_ = std::make_shared<detail::Spline>(x, lp);
    q_ = std::make_shared<detail::Spline>(x, q);
  }

 private:
  struct Values {
    double psi, dpsi, f;
  };
  Values eval(double x) const {
    if (!(x > 0.0)) throw Error("scaling profile: r must be positive");
    if (x > r.back() * (1 + 1e-12)) throw Error("scaling profile: r = " + std::to_string(x) + " beyond the sampled range");
    const double lx = std::log(x);
    const double l0 = std::log(r.front());
    double lp, slope, q;
    if (lx < l0) {
      slope = log_psi_->derivative(l0);
      lp = (*log_psi_)(l0) + slope * (lx - l0);
      q = (*q_)(l0);
    } else {
      const double lc = std::min(lx, std::log(r.back()));
      lp = (*log_psi_)(lc);
      slope = log_psi_->derivative(lc);
      q = (*q_)(lc);
    }
    const double p = std::exp(lp);
    return {p, p * slope / x, q * p / x};
  }

  std::shared_ptr<detail::Spline> log_psi_, q_;
};

/// Profile from explicit formulas.
inline ScalingProfile profile_from_functions(int n, double vol0, std::function<double(double)> psi,
                                             std::function<double(double)> dpsi, std::function<double(double)> f) {
  ScalingProfile prof;
  prof.n = n;
  prof.vol0 = vol0;
  prof.provenance = ScalingProfile::Provenance::analytic;
  prof.psi_fn = std::move(psi);
  prof.dpsi_fn = std::move(dpsi);
  prof.f_fn = std::move(f);
  return prof;
}

/// Closed-form Ψ, f for the families that restrict to every ray.
inline ScalingProfile analytic_profile(const OperatorSpec& P, int n, double vol0) {
  ScalingProfile prof;
  switch (P.family) {
    case OperatorSpec::Family::identity:
    case OperatorSpec::Family::sobolev:
      prof = profile_from_functions(
          n, vol0, [](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; });
      break;
    case OperatorSpec::Family::conformal: {
      const PhiFunction phi = P.phi;
      const double h = 0.5 * n;
      prof = profile_from_functions(
          n, vol0, [=](double r) { return phi.value(std::pow(r, h) * vol0); },
          [=](double r) { return phi.derivative(std::pow(r, h) * vol0) * h * std::pow(r, h - 1) * vol0; },
          [=](double r) { return h * phi.derivative(std::pow(r, h) * vol0) * std::pow(r, h - 1) * vol0; });
      break;
    }
    case OperatorSpec::Family::curvature:
      throw Error("analytic_profile: the curvature family restricts to rays only over Einstein metrics");
  }
  prof.spec = P;
  return prof;
}

/// Geometric samples r_lo = r_0 < … < r_{count−1} = r_hi.
inline std::vector<double> geometric_samples(double r_lo, double r_hi, int count) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo) || count < 3) throw Error("geometric_samples: need 0 < r_lo < r_hi, count >= 3");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (count - 1));
  out.back() = r_hi;
  return out;
}

/// Ψ(r) and f(r) by g̃⁰₂-projection onto g0 of P_{rg0}(g0) and of the
/// derivative adjoint, with the orthogonal residuals recorded.
inline ScalingProfile extract_psi_f(const OperatorSpec& P, const SymField& g0, const std::vector<double>& r_samples) {
  const Geometry geom0(g0);
  ScalingProfile prof;
  prof.spec = P;
  prof.n = g0.grid().dim;
  prof.vol0 = total_volume(geom0);
  prof.provenance = ScalingProfile::Provenance::extracted;
  prof.r = r_samples;
  const double gg = integrated_inner(geom0, g0, g0);
  auto project = [&](const SymField& a, double& coeff) {
    coeff = integrated_inner(geom0, a, g0) / gg;
    SymField rest = a;
    rest.axpy(-coeff, g0);
    return std::sqrt(std::max(0.0, integrated_inner(geom0, rest, rest)));
  };
  for (double r : r_samples) {
    const Geometry geom(r * g0);
    const SymField a = op_apply(P, geom, g0);
    const SymField b = op_derivative_adjoint(P, geom, g0, g0);
    double psi = 0.0, f = 0.0;
    const double na = std::sqrt(integrated_inner(geom0, a, a));
    const double nb = std::sqrt(integrated_inner(geom0, b, b));
    const double ra = project(a, psi);
    const double rb = project(b, f);
    prof.psi_residual = std::max(prof.psi_residual, na > 0.0 ? ra / na : 0.0);
    // f scales like Ψ/r, which sets the yardstick when the adjoint vanishes
    const double fscale = std::max(nb, na / r);
    prof.f_residual = std::max(prof.f_residual, fscale > 0.0 ? rb / fscale : 0.0);
    prof.psi.push_back(psi);
    prof.f.push_back(f);
  }
  prof.build_splines();
  return prof;
}

/// Samples of r(t) from the radial ODE
/// r″Ψ(r) = r′²(½f(r) − Ψ′(r) + (1 − n/4)Ψ(r)/r).
struct RadialPath {
  std::vector<double> t, r, rdot;
  bool reached_floor = false;
};

inline RadialPath scaling_ode(const ScalingProfile& prof, double r0, double rdot0, double T, double dt,
                              double r_floor = 1e-8) {
  if (!(r0 > 0.0) || !(dt > 0.0) || !(T >= 0.0)) throw Error("scaling_ode: need r0 > 0, dt > 0, T >= 0");
  const double c = 1.0 - prof.n / 4.0;
  auto accel = [&](double r, double v) {
    const double psi = prof.psi_at(r);
    if (!(psi > 0.0)) throw Error("scaling_ode: Ψ <= 0 at r = " + std::to_string(r));
    return v * v * (0.5 * prof.f_at(r) - prof.dpsi_at(r) + c * psi / r) / psi;
  };
  RadialPath path;
  double t = 0.0, r = r0, v = rdot0;
  path.t.push_back(t);
  path.r.push_back(r);
  path.rdot.push_back(v);
  double h = dt;
  int halvings = 0;
  while (t < T - 1e-14 * std::max(1.0, T)) {
    const double step = std::min(h, T - t);
    bool ok = true;
    double rn = 0.0, vn = 0.0;
    {
      const double k1r = v, k1v = accel(r, v);
      const double r2 = r + 0.5 * step * k1r;
      ok = r2 > 0.0;
      const double k2r = v + 0.5 * step * k1v, k2v = ok ? accel(r2, k2r) : 0.0;
      const double r3 = r + 0.5 * step * k2r;
      ok = ok && r3 > 0.0;
      const double k3r = v + 0.5 * step * k2v, k3v = ok ? accel(r3, k3r) : 0.0;
      const double r4 = r + step * k3r;
      ok = ok && r4 > 0.0;
      const double k4r = v + step * k3v, k4v = ok ? accel(r4, k4r) : 0.0;
      rn = r + step / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
      vn = v + step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
      ok = ok && rn > 0.0 && std::isfinite(rn) && std::isfinite(vn);
      // r′ cannot change sign along a solution (v = 0 is an equilibrium of
      // v′ ∝ v²), so a flip means the step jumped across r = 0
      ok = ok && (v == 0.0 || vn * v > 0.0);
    }
    if (!ok) {
      if (++halvings > 60) {
        path.reached_floor = true;
        break;
      }
      h = 0.5 * step;
      continue;
    }
    t += step;
    r = rn;
    v = vn;
    path.t.push_back(t);
    path.r.push_back(r);
    path.rdot.push_back(v);
    if (r <= r_floor) {
      path.reached_floor = true;
      break;
    }
  }
  return path;
}

namespace detail {
inline double scaling_exponent(int n, std::optional<double> k) {
  const double a = k ? n * (1.0 + *k) / 4.0 : n / 4.0;
  if (a == 0.0) throw Error("closed_form_scaling: degenerate exponent");
  return a;
}
}  // namespace detail

/// r(t) = (t(r1^a − r0^a) + r0^a)^{1/a} with a = n/4 (no k, the L² metric)
/// or a = n(1+k)/4 (conformal Φ = Vol^k).
inline double closed_form_scaling(int n, std::optional<double> k, double r0, double r1, double t) {
  const double a = detail::scaling_exponent(n, k);
  if (!(r0 > 0.0) || !(r1 > 0.0)) throw Error("closed_form_scaling: need r0, r1 > 0");
  return std::pow(t * (std::pow(r1, a) - std::pow(r0, a)) + std::pow(r0, a), 1.0 / a);
}

/// Same family of curves from initial data: r^a is affine in t with slope a r0^{a−1} r′(0).
inline double closed_form_radial(int n, std::optional<double> k, double r0, double rdot0, double t) {
  const double a = detail::scaling_exponent(n, k);
  if (!(r0 > 0.0)) throw Error("closed_form_radial: need r0 > 0");
  const double base = std::pow(r0, a) + a * std::pow(r0, a - 1.0) * rdot0 * t;
  return base > 0.0 ? std::pow(base, 1.0 / a) : 0.0;
}

struct LengthResult {
  double length = std::numeric_limits<double>::infinity();
  bool finite = false;
  std::string criterion;
  /// Curvature family only: false when n ≤ 8k, where the growth bound alone
  /// does not guarantee a finite length.
  bool bound_guarantees_finite = true;
};

/// Length of r·g0, r ∈ [0,1]: √(n Vol0) ∫₀¹ √(Ψ(r) r^{n/2−2}) dr, with r = u².
inline LengthResult scaling_length(const ScalingProfile& prof, std::optional<int> n_override = std::nullopt,
                                   std::optional<double> vol_override = std::nullopt) {
  const int n = n_override.value_or(prof.n);
  const double vol0 = vol_override.value_or(prof.vol0);
  LengthResult out;
  const double alpha = prof.small_r_exponent();
  std::ostringstream crit;
  crit << "Psi(r) ~ r^" << alpha << " as r -> 0, finite iff exponent > " << -0.5 * n;
  out.criterion = crit.str();
  if (!(alpha > -0.5 * n + 1e-9)) return out;
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    return 2.0 * std::sqrt(prof.psi_at(u * u)) * std::pow(u, 0.5 * n - 1.0);
  };
  const auto q = detail::integrate_qags(integrand, 0.0, 1.0, 0.0, 1e-8);
  if (q.status != GSL_SUCCESS || !std::isfinite(q.value)) {
    out.criterion += "; quadrature did not converge (" + std::string(gsl_strerror(q.status)) + ")";
    return out;
  }
  out.length = std::sqrt(n * vol0) * q.value;
  out.finite = true;
  return out;
}

/// Length of r·g0, r ∈ [0,1], under Φ(Scal): with u = r^{n/4},
/// (4/n)√n ∫₀¹ (∫_M Φ(Scal(g0)/u^{4/n}) vol(g0))^{1/2} du.
inline LengthResult curvature_scaling_length(const OperatorSpec& P, const SymField& g0) {
  if (P.family != OperatorSpec::Family::curvature) throw Error("curvature_scaling_length: needs the curvature family");
  const Geometry geom0(g0);
  const int n = g0.grid().dim;
  const ScalarField scal = curvature(geom0).scal;
  LengthResult out;
  out.bound_guarantees_finite = n > 8.0 * P.phi.bound_k;
  std::ostringstream crit;
  crit << "n = " << n << ", k = " << P.phi.bound_k
       << (out.bound_guarantees_finite ? ": n > 8k, the growth bound guarantees a finite length"
                                       : ": bound does not guarantee finiteness (n <= 8k)");
  out.criterion = crit.str();

  auto inner = [&](double u) {
    const double r = std::pow(u, 4.0 / n);
    ScalarField w(g0.grid());
    for (std::size_t p = 0; p < w.values.size(); ++p) w[p] = P.phi.value(scal[p] / r);
    const double v = integrate_with_density(geom0, w);
    if (v < 0.0) throw Error("curvature_scaling_length: ∫Φ(Scal/r) vol is negative");
    return std::sqrt(v);
  };
  // divergence detection from the power law of the integrand near u = 0
  const double u1 = 1e-4, u2 = 1e-3;
  const double f1 = inner(u1), f2 = inner(u2);
  const double beta = std::isfinite(f1) && f1 > 0.0 && f2 > 0.0 ? -std::log(f2 / f1) / std::log(u2 / u1)
                                                                 : std::numeric_limits<double>::infinity();
  if (!(beta < 1.0 - 1e-6)) {
    out.criterion += "; integrand grows like u^-" + std::to_string(beta) + " near 0: infinite length";
    return out;
  }
  auto integrand = [&](double u) { return u <= 0.0 ? inner(u1 * 1e-6) : inner(u); };
  const auto q = detail::integrate_qags(integrand, 0.0, 1.0, 0.0, 1e-8);
  if (q.status != GSL_SUCCESS || !std::isfinite(q.value)) {
    out.criterion += "; quadrature did not converge (" + std::string(gsl_strerror(q.status)) + ")";
    return out;
  }
  out.length = 4.0 / n * std::sqrt(static_cast<double>(n)) * q.value;
  out.finite = true;
  return out;
}

struct TotallyGeodesicReport {
  double psi_residual = 0.0;     ///< P_{rg0}g0 off the ray
  double adjoint_residual = 0.0; ///< ((D_{(g,·)}P)g)*(g) off the ray, g = r g0
  bool restricts = false;
  bool ray_run_completed = false;
  double ray_residual = std::numeric_limits<double>::quiet_NaN();
  double radial_error = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::string note;
};

struct TotallyGeodesicOptions {
  double speed = 0.5;  ///< u0 = speed · g0
  double T = 1.0;
  double dt = 1e-2;
  double tol = 1e-6;
  std::vector<double> r_samples = geometric_samples(1e-3, 4.0, 33);
};

/// Numerical check that the ray ℝ₊g0 is totally geodesic for P: the two
/// projection conditions, then a field geodesic launched along the ray must
/// stay on it and follow the radial ODE.
inline TotallyGeodesicReport totally_geodesic_check(const OperatorSpec& P, const SymField& g0,
                                                    const TotallyGeodesicOptions& opt = {}) {
  TotallyGeodesicReport rep;
  std::optional<ScalingProfile> prof;
  try {
    prof = extract_psi_f(P, g0, opt.r_samples);
    rep.psi_residual = prof->psi_residual;
    rep.adjoint_residual = prof->f_residual;
  } catch (const Error& e) {
    rep.note = std::string("profile extraction failed: ") + e.what();
    rep.psi_residual = rep.adjoint_residual = std::numeric_limits<double>::infinity();
  }
  rep.restricts = prof && rep.psi_residual <= opt.tol && rep.adjoint_residual <= opt.tol;

  const Geometry geom0(g0);
  const double gg = integrated_inner(geom0, g0, g0);
  IntegratorOptions io;
  io.dt = opt.dt;
  io.T = opt.T;
  io.snapshot_every = 1;
  try {
    const Trajectory traj = integrate_geodesic(P, g0, opt.speed * g0, io);
    rep.ray_run_completed = !traj.boundary_reached;
    rep.ray_residual = 0.0;
    std::vector<double> radius;
    for (const auto& s : traj.states) {
      const double r = integrated_inner(geom0, s.g, g0) / gg;
      SymField rest = s.g;
      rest.axpy(-r, g0);
      rep.ray_residual = std::max(
          rep.ray_residual, std::sqrt(integrated_inner(geom0, rest, rest) / integrated_inner(geom0, s.g, s.g)));
      radius.push_back(r);
    }
    if (rep.restricts) {
      const RadialPath path = scaling_ode(*prof, 1.0, opt.speed, opt.T, opt.dt);
      rep.radial_error = 0.0;
      for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const std::size_t j = static_cast<std::size_t>(std::llround(traj.states[i].t / opt.dt));
        if (j >= path.t.size() || std::abs(path.t[j] - traj.states[i].t) > 1e-9) continue;
        rep.radial_error = std::max(rep.radial_error, std::abs(radius[i] - path.r[j]) / path.r[j]);
      }
    }
  } catch (const Error& e) {
    rep.note += (rep.note.empty() ? "" : "; ") + std::string("ray run failed: ") + e.what();
  }
  rep.pass = rep.restricts && rep.ray_run_completed && rep.ray_residual <= opt.tol && rep.radial_error <= opt.tol;
  return rep;
}

}  // namespace gpmetric
