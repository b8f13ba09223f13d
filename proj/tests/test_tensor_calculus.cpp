#include <catch_amalgamated.hpp>

#include "gpmetric/tensor_calculus.hpp"
#include "support.hpp"

using namespace gpmetric;
using namespace testing_support;
using Catch::Approx;

namespace {

Grid torus(int n) { return square_grid(2, n, 2 * pi); }

SymField diag41(const Grid& grid) {
  const double v[] = {4.0, 0.0, 1.0};
  return SymField::constant(grid, v);
}

SymField dx_dx(const Grid& grid) {
  const double v[] = {1.0, 0.0, 0.0};
  return SymField::constant(grid, v);
}

double phi_test(double x, double y) { return 0.1 * std::sin(x) * std::sin(y); }

}  // namespace

TEST_CASE("metric inverse") {
  const Grid grid = torus(16);
  CHECK(metric_inverse(SymField::identity(grid)).data() == SymField::identity(grid).to_tensor().data());

  const TensorField inv = metric_inverse(diag41(grid));
  CHECK(inv.slot(0) == Index::up);
  CHECK(inv(0, 5) == 0.25);
  CHECK(inv(3, 5) == 1.0);
  CHECK(inv(1, 5) == 0.0);

  const SymField g = random_smooth_fields(torus(32), 3, 0.4, 2).metric;
  const Geometry geom(g);
  double worst = 0.0;
  for (std::size_t p = 0; p < g.points(); ++p)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int k = 0; k < 2; ++k) s += g(i, k, p) * geom.inverse()(k, j, p);
        worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
  CHECK(worst <= 1e-13);

  const double bad[] = {1.0, 0.0, 1e-14};
  CHECK_THROWS_AS(Geometry(SymField::constant(grid, bad)), Error);
}

TEST_CASE("pointwise tensor metrics and traces") {
  const Grid grid = torus(16);
  const auto rf = random_smooth_fields(grid, 11, 0.3, 2);
  const Geometry geom(rf.metric);
  const ScalarField gg = pointwise_inner(geom, geom.metric().to_tensor(), geom.metric().to_tensor());
  for (double v : gg.values) CHECK(v == Approx(2.0).epsilon(1e-13));

  const SymField k = random_smooth_fields(grid, 12, 0.3, 2).tangent;
  const ScalarField hk = pointwise_inner(geom, rf.tangent, k);
  const ScalarField kh = pointwise_inner(geom, k, rf.tangent);
  CHECK(max_abs_diff(hk.values, kh.values) <= 1e-15);
  // symmetric fast path agrees with the generic contraction
  const ScalarField generic = pointwise_inner(geom, rf.tangent.to_tensor(), k.to_tensor());
  CHECK(max_abs_diff(hk.values, generic.values) <= 1e-14);

  const Geometry d41(diag41(grid));
  for (double v : pointwise_inner(d41, dx_dx(grid), dx_dx(grid)).values) CHECK(v == Approx(1.0 / 16.0));
  const TensorField tr41 = trace_g(d41, dx_dx(grid).to_tensor());
  for (double v : tr41.data()) CHECK(v == Approx(0.25));
  const TensorField trg = trace_g(geom, geom.metric().to_tensor());
  for (double v : trg.data()) CHECK(v == Approx(2.0).epsilon(1e-13));

  TensorField id(grid, {Index::up, Index::down});
  std::fill_n(id.component(0), grid.size(), 1.0);
  std::fill_n(id.component(3), grid.size(), 1.0);
  const TensorField trid = trace_first_two(id);
  for (double v : trid.data()) CHECK(v == 2.0);

  CHECK_THROWS_AS(trace_first_two(dx_dx(grid).to_tensor()), Error);
  CHECK_THROWS_AS(trace_g(geom, id), Error);
  CHECK_THROWS_AS(pointwise_inner(geom, id, dx_dx(grid).to_tensor()), Error);
}

TEST_CASE("volume density and its variation") {
  const Grid grid = torus(32);
  const Geometry flat(SymField::identity(grid));
  for (double v : volume_density(flat).values) CHECK(v == 1.0);
  CHECK(total_volume(flat) == Approx(4 * pi * pi).epsilon(1e-14));
  CHECK(total_volume(Geometry(3.0 * SymField::identity(grid))) == Approx(3 * 4 * pi * pi).epsilon(1e-14));

  const SymField gc = conformal_metric(grid, phi_test);
  const ScalarField oracle = sample(grid, [](double x, double y) { return std::exp(2 * phi_test(x, y)); });
  CHECK(std::abs(total_volume(Geometry(gc)) - integrate_density(oracle)) <= 1e-10);

  for (double v : d_volume_density(flat, SymField::identity(grid)).values) CHECK(v == Approx(1.0));
  const double anti[] = {1.0, 0.3, -1.0};
  for (double v : d_volume_density(flat, SymField::constant(grid, anti)).values) CHECK(std::abs(v) <= 1e-15);

  const auto rf = random_smooth_fields(grid, 5, 0.3, 2);
  const SymField m = random_smooth_fields(grid, 6, 0.3, 2).tangent;
  const auto fd = fd_in_metric([](const SymField& g) { return Geometry(g).density().values; }, rf.metric, m, 1e-5);
  CHECK(rel_diff(d_volume_density(Geometry(rf.metric), m).values, fd) <= 1e-8);
}

TEST_CASE("christoffel symbols") {
  const Grid grid = torus(64);
  const Geometry flat(SymField::identity(grid));
  for (double v : flat.christoffel().data()) CHECK(v == 0.0);

  // conformal closed forms: Γ^0_00 = φ_x, Γ^0_11 = −φ_x, Γ^0_01 = φ_y
  const Geometry geom(conformal_metric(grid, phi_test));
  const TensorField& gam = geom.christoffel();
  double err = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = grid.coordinate(p, 0), y = grid.coordinate(p, 1);
    const double px = 0.1 * std::cos(x) * std::sin(y), py = 0.1 * std::sin(x) * std::cos(y);
    err = std::max({err, std::abs(gam(0, p) - px), std::abs(gam(3, p) + px), std::abs(gam(1, p) - py),
                    std::abs(gam(2, p) - py), std::abs(gam(4, p) + py), std::abs(gam(7, p) - py),
                    std::abs(gam(5, p) - px), std::abs(gam(6, p) - px)});
  }
  CHECK(err <= 1e-6);
  for (int i = 0; i < 2; ++i)
    for (std::size_t p = 0; p < grid.size(); ++p) CHECK(gam(i * 4 + 1, p) == gam(i * 4 + 2, p));
}

TEST_CASE("metric compatibility") {
  // Γ is built from the same discrete partials as ∇, so ∇g vanishes to
  // rounding on every grid rather than converging at the stencil order
  for (int n : {32, 64}) {
    const SymField g = random_smooth_fields(torus(n), 21, 0.3, 2).metric;
    CHECK(max_abs(covariant_derivative(Geometry(g), g).data()) <= 1e-12);
  }
}

TEST_CASE("covariant derivative basics") {
  const Grid grid = torus(32);
  const Geometry flat(SymField::identity(grid));
  SymField h(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) h(0, 0, p) = std::sin(grid.coordinate(p, 0));
  const TensorField dh = covariant_derivative(flat, h);
  CHECK(dh.rank() == 3);
  const TensorField dx = partial_derivative(h.to_tensor(), 0);
  const TensorField dy = partial_derivative(h.to_tensor(), 1);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    CHECK(dh(0, p) == dx(0, p));
    CHECK(dh(4, p) == dy(0, p));
  }

  // torsion-free: the Hessian of a function is symmetric
  const Grid fine = torus(64);
  const Geometry geom(random_smooth_fields(fine, 8, 0.3, 2).metric);
  const ScalarField f = sample(fine, [](double x, double y) { return std::sin(x + 2 * y) + std::cos(x); });
  const TensorField hess = covariant_derivative(geom, covariant_derivative(geom, TensorField::from_scalar(f)));
  double asym = 0.0;
  for (std::size_t p = 0; p < fine.size(); ++p) asym = std::max(asym, std::abs(hess(1, p) - hess(2, p)));
  CHECK(asym <= 1e-6);
}

TEST_CASE("divergence is the adjoint of the covariant derivative") {
  std::vector<double> errors;
  for (int n : {32, 64}) {
    const Grid grid = torus(n);
    const Geometry geom(random_smooth_fields(grid, 31, 0.3, 2).metric);
    const TensorField b = random_tensor(grid, {Index::down, Index::down}, 1);
    const TensorField c = random_tensor(grid, {Index::down, Index::down, Index::down}, 2);
    const double lhs = integrated_inner(geom, covariant_derivative(geom, b), c);
    const double rhs = integrated_inner(geom, b, nabla_star(geom, c));
    errors.push_back(rel_diff(lhs, rhs));
  }
  CHECK(errors[0] <= 1e-4);
  CHECK(errors[0] / errors[1] >= 4.0);

  const Grid line = square_grid(1, 64, 2 * pi);
  const Geometry flat1(SymField::identity(line));
  TensorField b(line, {Index::down});
  for (std::size_t p = 0; p < line.size(); ++p) b(0, p) = std::sin(line.coordinate(p, 0));
  const TensorField div = nabla_star(flat1, b);
  CHECK(div.rank() == 0);
  double err = 0.0;
  for (std::size_t p = 0; p < line.size(); ++p) err = std::max(err, std::abs(div(0, p) + std::cos(line.coordinate(p, 0))));
  CHECK(err <= 1e-5);

  TensorField constant(torus(16), {Index::down, Index::down});
  std::fill(constant.data().begin(), constant.data().end(), 0.7);
  CHECK(max_abs(nabla_star(Geometry(SymField::identity(torus(16))), constant).data()) == 0.0);
}

TEST_CASE("Bochner Laplacian") {
  const Grid grid = torus(64);
  const Geometry flat(SymField::identity(grid));
  SymField h(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) h(0, 0, p) = std::sin(grid.coordinate(p, 0));
  CHECK(rel_diff(bochner_laplacian(flat, h).data(), h.data()) <= 1e-4);
  const double c[] = {1.0, 2.0, 3.0};
  CHECK(bochner_laplacian(flat, SymField::constant(grid, c)).max_abs() == 0.0);

  std::vector<double> errors;
  for (int n : {32, 64}) {
    const Grid gr = torus(n);
    const auto rf = random_smooth_fields(gr, 41, 0.3, 2);
    const Geometry geom(rf.metric);
    const SymField k = random_smooth_fields(gr, 42, 0.3, 2).tangent;
    const double lhs = integrated_inner(geom, bochner_laplacian(geom, rf.tangent), k);
    const double rhs = integrated_inner(geom, rf.tangent, bochner_laplacian(geom, k));
    errors.push_back(rel_diff(lhs, rhs));
    CHECK(integrated_inner(geom, bochner_laplacian(geom, rf.tangent), rf.tangent) >= -1e-8);
  }
  CHECK(errors[0] <= 1e-4);
  CHECK(errors[0] / errors[1] >= 4.0);
}

TEST_CASE("curvature") {
  const Grid grid = torus(64);
  const Curvature flat = curvature(Geometry(SymField::identity(grid)));
  CHECK(max_abs(flat.riemann.data()) == 0.0);
  CHECK(flat.ricci.max_abs() == 0.0);
  CHECK(max_abs(flat.scal.values) == 0.0);

  // conformal metrics: Scal = −2 e^{−2φ} Δ₀φ, with Δ₀φ = −0.2 sin x sin y
  const Geometry geom(conformal_metric(grid, phi_test));
  const Curvature curv = curvature(geom);
  const ScalarField oracle = sample(grid, [](double x, double y) {
    return -2.0 * std::exp(-2.0 * phi_test(x, y)) * (-0.2 * std::sin(x) * std::sin(y));
  });
  CHECK(rel_diff(curv.scal.values, oracle.values) <= 1e-4);

  const Geometry rnd(random_smooth_fields(grid, 17, 0.3, 2).metric);
  const Curvature rc = curvature(rnd);
  const double gb = integrate_with_density(rnd, rc.scal);
  CHECK(std::abs(gb) <= 1e-6 * max_abs(rc.scal.values) * total_volume(rnd));

  // translation equivariance, bitwise
  const SymField& g = rnd.metric();
  SymField shifted(grid);
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) shifted.component(s)[grid.point(i + 1, j)] = g.component(s)[grid.point(i, j)];
  const Curvature sc = curvature(Geometry(shifted));
  bool same = true;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) same = same && sc.scal[grid.point(i + 1, j)] == rc.scal[grid.point(i, j)];
  CHECK(same);

  // dimension one is flat
  const Grid line = square_grid(1, 32, 1.0);
  SymField g1(line);
  for (std::size_t p = 0; p < line.size(); ++p) g1(0, 0, p) = 1.0 + 0.3 * std::sin(2 * pi * line.coordinate(p, 0));
  CHECK(curvature(Geometry(g1)).ricci.max_abs() == 0.0);
}

TEST_CASE("variation of scalar curvature") {
  const Grid small = torus(16);
  CHECK(max_abs(d_scal(Geometry(SymField::identity(small)), SymField::identity(small)).values) == 0.0);

  std::vector<double> errors;
  for (int n : {32, 64}) {
    const Grid grid = torus(n);
    const SymField g = random_smooth_fields(grid, 51, 0.2, 1).metric;
    const SymField m = random_smooth_fields(grid, 52, 0.2, 1).tangent;
    const auto fd = fd_richardson([](const SymField& x) { return curvature(Geometry(x)).scal.values; }, g, m, 1e-5);
    const Geometry geom(g);
    errors.push_back(rel_diff(d_scal(geom, m).values, fd));
    if (n == 32) {
      // chain rule for ∫ Scal vol
      auto total = [](const SymField& x) {
        const Geometry gx(x);
        return std::vector<double>{integrate_with_density(gx, curvature(gx).scal)};
      };
      const double fd_total = fd_in_metric(total, g, m, 1e-5)[0];
      const Curvature curv = curvature(geom);
      const ScalarField ds = d_scal(geom, curv, m);
      const ScalarField dv = d_volume_density(geom, m);
      double chain = integrate_with_density(geom, ds), scale = 0.0;
      for (std::size_t p = 0; p < grid.size(); ++p) {
        chain += curv.scal[p] * dv[p] * grid.cell_volume();
        scale += std::abs(ds[p]) * geom.density()[p] * grid.cell_volume();
      }
      // both sides vanish by Gauss-Bonnet; compare against the integrand size
      CHECK(std::abs(chain - fd_total) <= 1e-3 * scale);
    }
  }
  CHECK(errors[0] <= 1e-3);
  CHECK(errors[0] / errors[1] >= 4.0);
}

TEST_CASE("variation of the connection") {
  const Grid grid = torus(32);
  const Geometry flat(SymField::identity(grid));
  const double c[] = {0.2, 0.1, -0.4};
  const TensorField t = random_tensor(grid, {Index::up, Index::down}, 9);
  CHECK(max_abs(n_apply(flat, SymField::constant(grid, c), t).data()) == 0.0);

  const auto rf = random_smooth_fields(grid, 61, 0.3, 2);
  const SymField m = random_smooth_fields(grid, 62, 0.3, 2).tangent;
  const Geometry geom(rf.metric);
  for (const auto& slots : {std::vector<Index>{Index::down, Index::down}, std::vector<Index>{Index::up},
                            std::vector<Index>{Index::up, Index::down, Index::down}}) {
    const TensorField x = random_tensor(grid, slots, 10);
    const auto fd = fd_richardson([&](const SymField& g) { return covariant_derivative(Geometry(g), x).data(); },
                                  rf.metric, m, 1e-5);
    CHECK(rel_diff(n_apply(geom, m, x).data(), fd) <= 1e-3);
  }

  const ConnectionVariation nv = connection_variation(geom, m);
  double err = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (std::size_t p = 0; p < grid.size(); ++p)
          err = std::max(err, std::abs(nv.down((i * 2 + j) * 2 + k, p) + nv.up((i * 2 + k) * 2 + j, p)));
  CHECK(err <= 1e-13);
}

TEST_CASE("variation of the Laplacian") {
  const Grid small = torus(16);
  const Geometry flat(SymField::identity(small));
  const double c1[] = {0.5, 0.1, 0.3}, c2[] = {1.0, -0.2, 0.4};
  CHECK(d_laplacian(flat, SymField::constant(small, c1), SymField::constant(small, c2)).max_abs() == 0.0);

  const Grid grid = torus(32);
  const auto rf = random_smooth_fields(grid, 71, 0.3, 2);
  const SymField m1 = random_smooth_fields(grid, 72, 0.3, 2).tangent;
  const SymField m2 = random_smooth_fields(grid, 73, 0.3, 2).tangent;
  const Geometry geom(rf.metric);
  const auto fd = fd_richardson([&](const SymField& g) { return bochner_laplacian(Geometry(g), rf.tangent).data(); },
                                rf.metric, m1, 1e-5);
  CHECK(rel_diff(d_laplacian(geom, m1, rf.tangent).data(), fd) <= 1e-3);

  SymField combo = 2.0 * m1;
  combo.axpy(-3.0, m2);
  SymField expected = 2.0 * d_laplacian(geom, m1, rf.tangent);
  expected.axpy(-3.0, d_laplacian(geom, m2, rf.tangent));
  CHECK(max_abs_diff(d_laplacian(geom, combo, rf.tangent).data(), expected.data()) <= 1e-12 * expected.max_abs());
}

TEST_CASE("total symbol of the connection variation") {
  const Grid grid = torus(32);
  const auto rf = random_smooth_fields(grid, 81, 0.3, 2);
  const SymField m = random_smooth_fields(grid, 82, 0.3, 2).tangent;
  const Geometry geom(rf.metric);

  const TensorField zero(grid, {Index::down, Index::down, Index::down});
  CHECK(max_abs(sigma_n_apply(geom, zero, rf.tangent.to_tensor()).data()) == 0.0);

  const TensorField dm = covariant_derivative(geom, m);
  for (const auto& h : {rf.tangent.to_tensor(), random_tensor(grid, {Index::down}, 3),
                        random_tensor(grid, {Index::down, Index::down, Index::down}, 4)}) {
    const TensorField via_symbol = sigma_n_apply(geom, dm, h);
    const TensorField direct = n_apply(geom, m, h);
    CHECK(max_abs_diff(via_symbol.data(), direct.data()) <= 1e-12 * std::max(1.0, max_abs(direct.data())));
  }

  // q = 1 at one point: (N^0_1(m)α)_{ja} = −½ g^{lb}(∇_a m_{jb} + ∇_j m_{ab} − ∇_b m_{aj}) α_l
  const TensorField alpha = random_tensor(grid, {Index::down}, 5);
  const TensorField sym = sigma_n_apply(geom, dm, alpha);
  const std::size_t p = 137;
  auto D = [&](int a, int b, int c) { return dm((a * 2 + b) * 2 + c, p); };
  for (int j = 0; j < 2; ++j)
    for (int a = 0; a < 2; ++a) {
      double expected = 0.0;
      for (int l = 0; l < 2; ++l)
        for (int b = 0; b < 2; ++b)
          expected -= 0.5 * geom.inverse()(l, b, p) * (D(a, j, b) + D(j, a, b) - D(b, a, j)) * alpha(l, p);
      CHECK(sym(j * 2 + a, p) == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("adjoint of the connection variation") {
  const Grid small = torus(16);
  const Geometry flat16(SymField::identity(small));
  CHECK(n_adjoint(flat16, TensorField(small, {Index::down, Index::down}),
                  random_tensor(small, {Index::down, Index::down, Index::down}, 1))
            .max_abs() == 0.0);

  std::vector<double> errors;
  for (int n : {32, 64}) {
    const Grid grid = torus(n);
    const auto rf = random_smooth_fields(grid, 91, 0.3, 2);
    const SymField m = random_smooth_fields(grid, 92, 0.3, 2).tangent;
    const Geometry geom(rf.metric);
    const TensorField k = random_tensor(grid, {Index::down, Index::down, Index::down}, 7);
    const double lhs = integrated_inner(geom, n_apply(geom, m, rf.tangent.to_tensor()), k);
    const double rhs = integrated_inner(geom, m, n_adjoint(geom, rf.tangent.to_tensor(), k));
    errors.push_back(rel_diff(rhs, lhs));
  }
  CHECK(errors[0] <= 1e-3);
  CHECK(errors[0] / errors[1] >= 4.0);

  // flat metric, h = δ: σ(m̃)δ = −m̃ for m̃ symmetric in its last two slots, so
  // the adjoint is Sym_{ab} Σ_x ∂_x (Sym_{23} k)_{xab}
  const Grid grid = torus(64);
  const Geometry flat(SymField::identity(grid));
  TensorField k(grid, {Index::down, Index::down, Index::down});
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = grid.coordinate(p, 0), y = grid.coordinate(p, 1);
    k(0, p) = std::sin(x);            // k_000
    k(1, p) = std::cos(y);            // k_001
    k(6, p) = std::sin(x + y);        // k_110
    k(7, p) = std::cos(2 * x);        // k_111
  }
  const SymField adj = n_adjoint(flat, SymField::identity(grid).to_tensor(), k);
  double err = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = grid.coordinate(p, 0), y = grid.coordinate(p, 1);
    // Σ_x ∂_x k_{x(ab)}: (00) ∂_0 k_000 ; (01) ½(∂_0 k_001 + ∂_1 k_110) ; (11) ∂_1 k_111
    const double e00 = std::cos(x);
    const double e01 = 0.5 * (0.0 + std::cos(x + y));
    const double e11 = 0.0;
    err = std::max({err, std::abs(adj(0, 0, p) - e00), std::abs(adj(0, 1, p) - e01), std::abs(adj(1, 1, p) - e11)});
  }
  CHECK(err <= 1e-5);
}

TEST_CASE("integrated inner product") {
  const Grid grid = torus(16);
  const Geometry flat(SymField::identity(grid));
  CHECK(integrated_inner(flat, SymField::identity(grid), SymField::identity(grid)) ==
        Approx(8 * pi * pi).epsilon(1e-14));

  const auto rf = random_smooth_fields(grid, 101, 0.3, 2);
  const Geometry geom(rf.metric);
  const SymField h = rf.tangent;
  const SymField k = random_smooth_fields(grid, 102, 0.3, 2).tangent;
  const SymField l = random_smooth_fields(grid, 103, 0.3, 2).tangent;
  CHECK(integrated_inner(geom, h, h) > 0.0);
  const double hk = integrated_inner(geom, h, k);
  CHECK(std::abs(hk - integrated_inner(geom, k, h)) <= 1e-12 * std::abs(hk));
  SymField combo = 2.0 * k;
  combo.axpy(0.5, l);
  const double lin = 2.0 * hk + 0.5 * integrated_inner(geom, h, l);
  CHECK(std::abs(integrated_inner(geom, h, combo) - lin) <= 1e-12 * std::abs(lin));
}

TEST_CASE("fundamental vector field") {
  const Grid grid = torus(64);
  const Geometry flat(SymField::identity(grid));
  CHECK(fundamental_vector_field(flat, TensorField(grid, {Index::up})).max_abs() == 0.0);
  TensorField ex(grid, {Index::up});
  std::fill_n(ex.component(0), grid.size(), 1.0);
  CHECK(fundamental_vector_field(flat, ex).max_abs() == 0.0);

  // oracle: d/dt ψ_t^* g at t = 0 for ψ_t = id + tX, using the closed-form g
  auto gfun = [](double x, double y, int i, int j) {
    if (i == 0 && j == 0) return 1.0 + 0.2 * std::sin(x) * std::cos(y);
    if (i == 1 && j == 1) return 1.0 + 0.1 * std::cos(x + y);
    return 0.1 * std::sin(y);
  };
  auto X = [](double x, double y) { return std::array<double, 2>{std::sin(y), 0.5 * std::cos(x)}; };
  auto dX = [](double x, double y) {  // dX[a][i] = ∂_i X^a
    return std::array<std::array<double, 2>, 2>{{{0.0, std::cos(y)}, {-0.5 * std::sin(x), 0.0}}};
  };
  SymField g(grid);
  TensorField xf(grid, {Index::up});
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = grid.coordinate(p, 0), y = grid.coordinate(p, 1);
    g(0, 0, p) = gfun(x, y, 0, 0);
    g(0, 1, p) = gfun(x, y, 0, 1);
    g(1, 1, p) = gfun(x, y, 1, 1);
    xf(0, p) = X(x, y)[0];
    xf(1, p) = X(x, y)[1];
  }
  const double t = 1e-4;
  auto pullback = [&](double s, std::size_t p, int i, int j) {
    const double x = grid.coordinate(p, 0), y = grid.coordinate(p, 1);
    const auto v = X(x, y);
    const auto d = dX(x, y);
    const double px = x + s * v[0], py = y + s * v[1];
    double sum = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double ja = (a == i ? 1.0 : 0.0) + s * d[a][i];
        const double jb = (b == j ? 1.0 : 0.0) + s * d[b][j];
        sum += gfun(px, py, std::min(a, b), std::max(a, b)) * ja * jb;
      }
    return sum;
  };
  const SymField zeta = fundamental_vector_field(Geometry(g), xf);
  std::vector<double> oracle(zeta.data().size());
  for (int s = 0; s < 3; ++s) {
    const int i = s == 2 ? 1 : 0, j = s == 0 ? 0 : 1;
    for (std::size_t p = 0; p < grid.size(); ++p)
      oracle[s * grid.size() + p] = (pullback(t, p, i, j) - pullback(-t, p, i, j)) / (2 * t);
  }
  CHECK(rel_diff(zeta.data(), oracle) <= 1e-2);
}
