#include "esdf/mesh_amr.hpp"

#include <doctest.h>

#include <cmath>

using namespace esdf;
using doctest::Approx;

namespace {

Vector2 closure(const Mesh& m, int c) {
  Vector2 s{0.0, 0.0};
  for (const auto& [fi, sign] : m.cell_faces(c)) {
    const auto& f = m.faces()[static_cast<std::size_t>(fi)];
    s[0] += sign * f.fn.n[0] * f.fn.area;
    s[1] += sign * f.fn.n[1] * f.fn.area;
  }
  return s;
}

double integral(const Mesh& m, const std::vector<double>& f) {
  double s = 0.0;
  for (int c = 0; c < m.size(); ++c) s += f[static_cast<std::size_t>(c)] * m.volume(c);
  return s;
}

std::vector<int> refine_near(const Mesh& m, double x, double y, double r) {
  std::vector<int> flags(static_cast<std::size_t>(m.size()), 0);
  for (int c = 0; c < m.size(); ++c) {
    const auto p = m.center(c);
    if (std::hypot(p[0] - x, p[1] - y) < r) flags[static_cast<std::size_t>(c)] = 1;
  }
  return flags;
}

}  // namespace

TEST_CASE("periodic 1D mesh has one face per cell") {
  Mesh m({1, 10, 1, 0.0, 1.0, 0.0, 1.0, true, false, 0});
  CHECK(m.size() == 10);
  CHECK(m.faces().size() == 10);
  for (const auto& f : m.faces()) CHECK(f.side == -1);
  Mesh w({1, 10, 1, 0.0, 1.0, 0.0, 1.0, false, false, 0});
  CHECK(w.faces().size() == 11);
  CHECK(w.volume(0) == Approx(0.1));
}

TEST_CASE("refined 2D cell meets a coarse neighbour through two half faces") {
  Mesh m({2, 4, 4, 0.0, 1.0, 0.0, 1.0, false, false, 1});
  std::vector<int> flags(static_cast<std::size_t>(m.size()), 0);
  int target = -1;
  for (int c = 0; c < m.size(); ++c)
    if (m.cell(c).i == 1 && m.cell(c).j == 1) target = c;
  flags[static_cast<std::size_t>(target)] = 1;
  m.adapt(flags);
  CHECK(m.size() == 19);
  int coarse = -1;
  for (int c = 0; c < m.size(); ++c)
    if (m.cell(c).level == 0 && m.cell(c).i == 2 && m.cell(c).j == 1) coarse = c;
  REQUIRE(coarse >= 0);
  int halves = 0;
  for (const auto& [fi, sign] : m.cell_faces(coarse)) {
    const auto& f = m.faces()[static_cast<std::size_t>(fi)];
    if (sign < 0 && f.fn.n[0] == 1.0) {
      CHECK(f.fn.area == Approx(0.125));
      CHECK(f.hanging);
      ++halves;
    }
  }
  CHECK(halves == 2);
}

TEST_CASE("every cell surface is closed after adaptation") {
  Mesh m({2, 8, 6, 0.0, 2.0, 0.0, 1.5, true, false, 2});
  for (int pass = 0; pass < 2; ++pass) m.adapt(refine_near(m, 0.6, 0.7, 0.35));
  CHECK(m.is_balanced());
  for (int c = 0; c < m.size(); ++c) {
    const auto s = closure(m, c);
    CHECK(std::abs(s[0]) < 1e-14);
    CHECK(std::abs(s[1]) < 1e-14);
  }
  double vol = 0.0;
  for (int c = 0; c < m.size(); ++c) vol += m.volume(c);
  CHECK(vol == Approx(3.0).epsilon(1e-14));
}

TEST_CASE("refinement keeps 2:1 balance across corners") {
  Mesh m({2, 8, 8, 0.0, 1.0, 0.0, 1.0, false, false, 3});
  for (int pass = 0; pass < 3; ++pass) m.adapt(refine_near(m, 0.5, 0.5, 0.1));
  CHECK(m.is_balanced());
  int finest = 0;
  for (int c = 0; c < m.size(); ++c) finest = std::max(finest, m.cell(c).level);
  CHECK(finest == 3);
}

TEST_CASE("refine then coarsen restores the mesh and conserves the integral") {
  Mesh m({2, 6, 4, 0.0, 1.0, 0.0, 1.0, false, false, 1});
  const int n0 = m.size();
  std::vector<double> f(static_cast<std::size_t>(n0));
  for (int c = 0; c < n0; ++c) f[static_cast<std::size_t>(c)] = 1.0 + 0.1 * c;
  const double total = integral(m, f);

  auto remap = m.adapt(std::vector<int>(static_cast<std::size_t>(n0), 1));
  f = apply_remap(remap, f);
  CHECK(m.size() == 4 * n0);
  CHECK(integral(m, f) == Approx(total).epsilon(1e-14));

  remap = m.adapt(std::vector<int>(static_cast<std::size_t>(m.size()), -1));
  f = apply_remap(remap, f);
  CHECK(m.size() == n0);
  CHECK(integral(m, f) == Approx(total).epsilon(1e-14));
  for (int c = 0; c < n0; ++c) CHECK(f[static_cast<std::size_t>(c)] == Approx(1.0 + 0.1 * c));
}

TEST_CASE("refinement stops at the maximum level") {
  Mesh m({1, 4, 1, 0.0, 1.0, 0.0, 1.0, false, false, 1});
  m.adapt(std::vector<int>(4, 1));
  m.adapt(std::vector<int>(8, 1));
  CHECK(m.size() == 8);
}

TEST_CASE("indicator on a spike and on a constant field") {
  Mesh m({1, 5, 1, 0.0, 1.0, 0.0, 1.0, false, false, 0});
  const std::vector<double> spike{1, 1, 2, 1, 1};
  const auto e = m.refinement_indicator(spike);
  CHECK(e[2] == Approx(10.0 / 3.0));
  const auto flags = m.flags_from_indicator(e, 0.1);
  CHECK(flags[2] == 1);
  const std::vector<double> flat(5, 3.0);
  for (double v : m.refinement_indicator(flat)) CHECK(v == 0.0);
}

TEST_CASE("virtual value averages descendants") {
  Mesh m({1, 2, 1, 0.0, 1.0, 0.0, 1.0, false, false, 1});
  m.adapt(std::vector<int>{1, 0});
  REQUIRE(m.size() == 3);
  std::vector<double> f(3);
  for (int c = 0; c < 3; ++c) f[static_cast<std::size_t>(c)] = m.cell(c).level == 1 ? 2.0 + m.cell(c).i : 7.0;
  CHECK(m.virtual_value(f, 0, 0, 0) == Approx(2.5));
  CHECK(m.virtual_value(f, 1, 2, 0) == Approx(7.0));
}
