#include "esdf/cases.hpp"

#include <doctest.h>

#include <cmath>

using namespace esdf;
using doctest::Approx;

TEST_CASE("normal shock state satisfies the jump conditions in the shock frame") {
  const auto mix = GasMixture::from_names({"ideal"});
  const std::vector<double> Y{1.0};
  const auto pre = make_state(mix, 1.2, Y, {0.0, 0.0}, 1e5);
  const double g = 1.4, M1 = 1.22;
  const auto post = normal_shock_state(M1, pre, mix, g);
  const double W = M1 * std::sqrt(g * pre.p / pre.rho);
  const double u1 = W, u2 = post.vel[0] + W;
  CHECK(post.rho * u2 == Approx(pre.rho * u1).epsilon(1e-13));
  CHECK(post.p + post.rho * u2 * u2 == Approx(pre.p + pre.rho * u1 * u1).epsilon(1e-13));
  const double h1 = g / (g - 1) * pre.p / pre.rho, h2 = g / (g - 1) * post.p / post.rho;
  CHECK(h2 + 0.5 * u2 * u2 == Approx(h1 + 0.5 * u1 * u1).epsilon(1e-13));
  // The gas behind a left-running shock moves to the left.
  CHECK(post.vel[0] < 0.0);
  CHECK_THROWS_AS(normal_shock_ratios(0.9, g), DomainError);
}

TEST_CASE("case lookup") {
  CHECK(make_case("res1").id == "res1");
  CHECK(canonical_case_id("res2-moving-interface") == "res2");
  CHECK_THROWS_AS(make_case("res9"), ConfigError);
  const auto s = make_case("res3");
  CHECK(s.mesh.dim == 2);
}

TEST_CASE("convergence fit recovers a power law and rejects degenerate input") {
  std::vector<std::pair<double, double>> pts;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) pts.emplace_back(h, 7.0 * std::pow(h, 3.0));
  CHECK(convergence_fit(pts) == Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(convergence_fit({{1.0, 1.0}, {2.0, 2.0}}), DomainError);
  CHECK_THROWS_AS(convergence_fit({{1.0, 1.0}, {1.0, 2.0}, {3.0, 4.0}}), DomainError);
  CHECK_THROWS_AS(convergence_fit({{1.0, 1.0}, {2.0, 0.0}, {3.0, 4.0}}), DomainError);
  CHECK(linear_slope({{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}}) == Approx(2.0));
}

TEST_CASE("entropy history is relative to the first sample") {
  const auto h = entropy_history({{0.0, 5.0}, {1.0, 4.5}});
  CHECK(h[0].S == 0.0);
  CHECK(h[1].S == Approx(-0.5));
  CHECK(entropy_history({}).empty());
}

TEST_CASE("interface tracking and front location interpolate linearly") {
  Mesh m({2, 10, 2, 0.0, 1.0, 0.0, 0.2, false, false, 0});
  std::vector<double> Y(static_cast<std::size_t>(m.size()), 0.0);
  std::vector<double> p(static_cast<std::size_t>(m.size()), 1.0);
  for (int c = 0; c < m.size(); ++c) {
    const int i = m.cell(c).i;
    if (i >= 3 && i <= 6) Y[static_cast<std::size_t>(c)] = 1.0;
    if (i >= 5) p[static_cast<std::size_t>(c)] = 3.0;
  }
  const auto tr = track_interface_points(m, Y);
  REQUIRE(tr.valid);
  // Cell centres at 0.05 + 0.1 i; the 0.5 level sits halfway between centres.
  CHECK(tr.downstream == Approx(0.3));
  CHECK(tr.upstream == Approx(0.7));
  CHECK(tr.jet == Approx(0.7));
  const auto x = front_position(m, p, 2.0);
  REQUIRE(x.has_value());
  CHECK(*x == Approx(0.5));
  CHECK_FALSE(front_position(m, p, 5.0).has_value());
}

TEST_CASE("initial conditions of the moving-interface case are at uniform pressure") {
  const auto s = make_case("res2");
  const auto mix = GasMixture::from_names(std::span<const std::string>(s.species));
  for (double x : {0.1, 0.35, 0.5, 0.8}) {
    const auto w = s.init(mix, {x, 0.0});
    CHECK(w.p == Approx(s.init(mix, {0.0, 0.0}).p).epsilon(1e-14));
  }
}
