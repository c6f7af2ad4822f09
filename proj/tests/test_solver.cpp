#include "esdf/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace esdf;
using doctest::Approx;

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

Mesh refined_mesh() {
  Mesh m({2, 8, 8, 0.0, 1.0, 0.0, 1.0, true, true, 1});
  std::vector<int> flags(sz(m.size()), 0);
  for (int c = 0; c < m.size(); ++c) {
    const auto x = m.center(c);
    if (std::hypot(x[0] - 0.5, x[1] - 0.5) < 0.2) flags[sz(c)] = 1;
  }
  m.adapt(flags);
  return m;
}

/// Helium blob in nitrogen, at uniform pressure and velocity.
std::vector<Vec> blob(const Mesh& m, const GasMixture& mix, double amp) {
  const Layout L = layout_for(mix, m.dim());
  std::vector<Vec> u(sz(m.size()));
  for (int c = 0; c < m.size(); ++c) {
    const auto x = m.center(c);
    const double y = 0.9 * std::exp(-30.0 * (std::pow(x[0] - 0.5, 2) + std::pow(x[1] - 0.5, 2)));
    const std::vector<double> Y{1.0 - y, y};
    const double rho = 1.0 + amp * std::sin(2 * M_PI * x[0]);
    u[sz(c)] = conserved_from_primitive(make_state(mix, rho, Y, {80.0, -40.0}, 1e5), mix, L);
  }
  return u;
}

}  // namespace

TEST_CASE("uniform pressure and velocity are preserved across species jumps") {
  const auto mix = GasMixture::from_names({"N2", "He"});
  auto mesh = refined_mesh();
  RunConfig cfg;
  Solver s(mesh, mix, cfg, {blob(mesh, mix, 0.0), {}, 0.0, 0});
  for (int k = 0; k < 3; ++k) s.step(s.compute_dt());
  const auto L = s.layout();
  double dev = 0.0;
  for (const auto& w : s.primitives()) {
    dev = std::max(dev, std::abs(w.p - 1e5) / 1e5);
    dev = std::max(dev, std::abs(w.vel[0] - 80.0) / 80.0);
    dev = std::max(dev, std::abs(w.vel[1] + 40.0) / 40.0);
  }
  CHECK(dev < 1e-9);
  CHECK(L.nvars() == 5);
}

TEST_CASE("parallel and serial residuals agree") {
  const auto mix = GasMixture::from_names({"N2", "He"});
  const auto mesh = refined_mesh();
  const Layout L = layout_for(mix, 2);
  RunConfig cfg;
  const auto u = blob(mesh, mix, 0.3);
  const auto fp = initial_frozen_pairs(mesh, mix, cfg, L, u);
  std::vector<Vec> a, b;
  ResidualWork wa, wb;
  cfg.threads = 2;
  spatial_residual(mesh, mix, cfg, L, u, fp, a, wa);
  spatial_residual_serial(mesh, mix, cfg, L, u, fp, b, wb);
  double scale = 0.0, diff = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    scale = std::max(scale, b[c].cwiseAbs().maxCoeff());
    diff = std::max(diff, (a[c] - b[c]).cwiseAbs().maxCoeff());
  }
  CHECK(diff <= 1e-12 * scale);
  CHECK(wa.dual_evaluations == wb.dual_evaluations);
  CHECK(wa.dual_evaluations > 0);
}

TEST_CASE("periodic run conserves species mass and momentum") {
  const auto mix = GasMixture::from_names({"N2", "He"});
  auto mesh = refined_mesh();
  RunConfig cfg;
  Solver s(mesh, mix, cfg, {blob(mesh, mix, 0.3), {}, 0.0, 0});
  for (int k = 0; k < 5; ++k) s.step(s.compute_dt());
  const auto L = s.layout();
  const Vec t0 = s.initial_totals().totals, t1 = s.totals().totals;
  for (int k : {0, L.rho(), L.mom(0), L.mom(1)})
    CHECK(std::abs(t1(k) - t0(k)) <= 1e-12 * std::max(std::abs(t0(k)), t0(L.rho())));
}

TEST_CASE("time step follows the CFL bound") {
  const auto mix = GasMixture::from_names({"N2"});
  Mesh mesh({1, 10, 1, 0.0, 1.0, 0.0, 1.0, true, false, 0});
  const Layout L = layout_for(mix, 1);
  const std::vector<double> Y{1.0};
  const auto w = make_state(mix, 1.2, Y, {50.0, 0.0}, 1e5);
  std::vector<Vec> u(10, conserved_from_primitive(w, mix, L));
  RunConfig cfg;
  cfg.cfl = 0.5;
  Solver s(mesh, mix, cfg, {u, {}, 0.0, 0});
  CHECK(s.compute_dt() == Approx(0.5 * 0.1 / (50.0 + w.sound_speed())).epsilon(1e-12));

  cfg.cfl = 1.5;
  CHECK_THROWS_AS(Solver(mesh, mix, cfg, {u, {}, 0.0, 0}), ConfigError);
  cfg.cfl = 0.0;
  CHECK_THROWS_AS(Solver(mesh, mix, cfg, {u, {}, 0.0, 0}), ConfigError);
  cfg.dt_fixed = 1e-6;
  CHECK(Solver(mesh, mix, cfg, {u, {}, 0.0, 0}).compute_dt() == 1e-6);
}

TEST_CASE("ghost states mirror the normal velocity at walls") {
  const auto mix = GasMixture::from_names({"N2"});
  const std::vector<double> Y{1.0};
  const auto w = make_state(mix, 1.0, Y, {3.0, 4.0}, 1e5);
  RunConfig cfg;
  cfg.bc = {BcKind::outflow, BcKind::slip_wall, BcKind::symmetry, BcKind::periodic};
  CHECK(ghost_state(w, kXLo, cfg, mix, 2).vel[0] == 3.0);
  CHECK(ghost_state(w, kXHi, cfg, mix, 2).vel[0] == -3.0);
  CHECK(ghost_state(w, kYLo, cfg, mix, 2).vel[1] == -4.0);
  CHECK(ghost_state(w, kYLo, cfg, mix, 2).vel[0] == 3.0);
  CHECK_THROWS_AS(ghost_state(w, kYHi, cfg, mix, 2), ConfigError);
  CHECK(parse_bc("wall") == BcKind::slip_wall);
  CHECK_THROWS_AS(parse_bc("sticky"), ConfigError);
}

TEST_CASE("regrid refines on density jumps and keeps mass") {
  const auto mix = GasMixture::from_names({"N2", "He"});
  Mesh mesh({2, 8, 8, 0.0, 1.0, 0.0, 1.0, true, true, 1});
  RunConfig cfg;
  cfg.amr.max_levels = 1;
  auto u = blob(mesh, mix, 0.0);
  const Layout L = layout_for(mix, 2);
  for (int c = 0; c < mesh.size(); ++c)
    if (mesh.center(c)[0] > 0.5) u[sz(c)] *= 2.0;
  Solver s(mesh, mix, cfg, {u, {}, 0.0, 0});
  const double m0 = s.totals().totals(s.layout().rho());
  s.regrid();
  CHECK(s.mesh().size() > 64);
  CHECK(s.totals().totals(L.rho()) == Approx(m0).epsilon(1e-14));
}
