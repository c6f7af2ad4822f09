#include "esdf/entropy_state.hpp"

#include <doctest.h>

using namespace esdf;
using doctest::Approx;

namespace {

GasMixture perfect_mix() {
  return GasMixture({{"a", 0.028, 3e4, {1040.0}, 1.0, 1e5},
                     {"b", 0.004, -2e4, {5193.0}, 1.0, 1e5},
                     {"c", 0.032, 0.0, {920.0}, 1.0, 1e5}});
}

PrimitiveState sample_state(const GasMixture& mix, int dim) {
  const std::vector<double> Y{0.5, 0.2, 0.3};
  return make_state(mix, 1.3, Y, {37.0, dim == 2 ? -12.0 : 0.0}, 1.4e5);
}

double U_of(const Vec& u, const GasMixture& mix, const Layout& L) {
  return entropy_pair(primitive_from_conserved(u, mix, L), mix, L).U;
}

}  // namespace

TEST_CASE("entropy variables are the gradient of U") {
  const auto mix = perfect_mix();
  for (int dim : {1, 2}) {
    const Layout L{3, dim};
    const auto w = sample_state(mix, dim);
    const Vec u = conserved_from_primitive(w, mix, L);
    const Vec v = entropy_vars(w, mix, L);
    for (int k = 0; k < L.nvars(); ++k) {
      const double h = 1e-5 * std::max(std::abs(u(k)), 1e-3 * u(L.rho()));
      Vec up = u, um = u;
      up(k) += h;
      um(k) -= h;
      const double g = (U_of(up, mix, L) - U_of(um, mix, L)) / (2.0 * h);
      CHECK(g == Approx(v(k)).epsilon(1e-6).scale(std::abs(v(k)) + 1e-3));
    }
  }
}

TEST_CASE("primitive, conserved and entropy variables round trip") {
  const auto mix = perfect_mix();
  const Layout L{3, 2};
  const auto w = sample_state(mix, 2);
  const Vec u = conserved_from_primitive(w, mix, L);
  const auto w2 = primitive_from_conserved(u, mix, L);
  CHECK(w2.p == Approx(w.p).epsilon(1e-13));
  CHECK(w2.T == Approx(w.T).epsilon(1e-13));
  CHECK(w2.vel[1] == Approx(w.vel[1]).epsilon(1e-13));
  const Vec u3 = conserved_from_entropy(entropy_vars(w, mix, L), mix, L);
  CHECK((u3 - u).norm() / u.norm() < 1e-13);
}

TEST_CASE("frozen decode uses the caloric relation") {
  const auto mix = GasMixture::from_names({"N2", "He"});
  const Layout L{2, 1};
  const std::vector<double> Y{0.7, 0.3};
  const auto w = make_state(mix, 0.9, Y, {20.0, 0.0}, 9e4);
  const auto fp = own_frozen_pair(w, mix);
  const Vec uf = conserved_from_primitive_frozen(w, L, fp);
  // At its own star pair the frozen energy equals the true energy.
  CHECK(uf(L.energy()) == Approx(conserved_from_primitive(w, mix, L)(L.energy())).epsilon(1e-12));
  const auto back = primitive_from_conserved_frozen(uf, mix, L, fp);
  CHECK(back.p == Approx(w.p).epsilon(1e-12));
  CHECK(back.T == Approx(w.T).epsilon(1e-12));
}

TEST_CASE("frozen decode floors pressure and rejects bad density") {
  const auto mix = GasMixture::from_names({"N2"});
  const Layout L{1, 1};
  Vec u(3);
  u << 1.0, 0.0, 1.0;  // far too little energy
  bool floored = false;
  const auto w = primitive_from_conserved_frozen(u, mix, L, {1.4, 0.0}, 5.0, &floored);
  CHECK(floored);
  CHECK(w.p == 5.0);
  u(0) = -1.0;
  CHECK_THROWS_AS(primitive_from_conserved_frozen(u, mix, L, {1.4, 0.0}, 5.0), UnstableStateError);
}

TEST_CASE("analytic A0 matches finite differences and is SPD") {
  const auto mix = perfect_mix();
  for (int dim : {1, 2}) {
    const Layout L{3, dim};
    const auto w = sample_state(mix, dim);
    const Mat A = entropy_jacobian(w, mix, L);
    const Mat Afd = entropy_jacobian_fd(conserved_from_primitive(w, mix, L), mix, L, own_frozen_pair(w, mix));
    CHECK((A - Afd).norm() / Afd.norm() < 1e-7);
    CHECK((A - A.transpose()).norm() / A.norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("frozen-model entropy variables use star heats") {
  const auto mix = perfect_mix();
  const Layout L{3, 1};
  const auto w = sample_state(mix, 1);
  const auto fp = own_frozen_pair(w, mix);
  const Vec a = entropy_vars(w, mix, L);
  const Vec b = entropy_vars(w, mix, L, &fp);
  // Momentum and energy entries do not depend on the caloric model.
  CHECK(a(L.mom(0)) == b(L.mom(0)));
  CHECK(a(L.energy()) == b(L.energy()));
  CHECK(a(0) != b(0));
}

TEST_CASE("entropy potential is r rho v") {
  const auto mix = perfect_mix();
  const Layout L{3, 2};
  const auto w = sample_state(mix, 2);
  const auto psi = entropy_potential(w, mix, L);
  CHECK(psi[0] == Approx(w.p / w.T * w.vel[0]).epsilon(1e-14));
  CHECK(psi[1] == Approx(w.p / w.T * w.vel[1]).epsilon(1e-14));
}

TEST_CASE("conserved_from_entropy rejects a non-negative last component") {
  const auto mix = perfect_mix();
  const Layout L{3, 1};
  Vec v = entropy_vars(sample_state(mix, 1), mix, L);
  v(L.energy()) = 0.0;
  CHECK_THROWS_AS(conserved_from_entropy(v, mix, L), DomainError);
}
