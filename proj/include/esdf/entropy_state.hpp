#pragma once

// State representations and the entropy-symmetrization maps.
//
// Conserved layout (n species, d dimensions):
//   u = (rho Y_1 .. rho Y_{n-1}, rho, rho v_1 .. rho v_d, rho E)
// Entropy variables, v = dU/du for U = -rho s:
//   v = ((g_i - g_n)/T  i < n,  (g_n - |v|^2/2)/T,  v/T,  -1/T)

#include "esdf/thermo.hpp"
#include "esdf/types.hpp"

namespace esdf {

/// Primitive state plus the per-species star heats at its temperature.
/// This is what the face fluxes consume.
struct PrimitiveState {
  double rho = 1.0;
  SpeciesArray Y{1.0};
  Vector2 vel{0.0, 0.0};
  double p = 1.0;
  double T = 1.0;
  SpeciesArray cv{};   // cv*_i(T)
  double gamma = 1.4;  // gamma used for the sound speed

  double sound_speed() const { return std::sqrt(gamma * p / rho); }
  double normal_velocity(const Vector2& n, int dim) const {
    double vn = 0.0;
    for (int k = 0; k < dim; ++k) vn += vel[static_cast<std::size_t>(k)] * n[static_cast<std::size_t>(k)];
    return vn;
  }
  double speed2(int dim) const {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += vel[static_cast<std::size_t>(k)] * vel[static_cast<std::size_t>(k)];
    return s;
  }
};

inline Layout layout_for(const GasMixture& mix, int dim) { return {mix.size(), dim}; }

/// Recovers rho_i (all n) from u; species n by difference, clipped at 0.
SpeciesArray partial_densities(const Vec& u, const Layout& L);

/// Full-thermodynamics decode: T from the energy inversion, p = r rho T.
PrimitiveState primitive_from_conserved(const Vec& u, const GasMixture& mix, const Layout& L,
                                        double t_guess = 300.0);

/// Double-Flux decode: p from the frozen caloric relation, T = p/(rho r).
PrimitiveState primitive_from_conserved_frozen(const Vec& u, const GasMixture& mix,
                                               const Layout& L, const FrozenPair& fp,
                                               double p_floor = 0.0, bool* floored = nullptr);

/// Fills T-dependent fields (cv*, gamma) for a state whose rho, Y, vel, p, T are set.
void complete_thermo(PrimitiveState& w, const GasMixture& mix);

/// Builds a state from (rho, Y, vel, p); T follows from the equation of state.
PrimitiveState make_state(const GasMixture& mix, double rho, std::span<const double> Y,
                          const Vector2& vel, double p);

Vec conserved_from_primitive(const PrimitiveState& w, const GasMixture& mix, const Layout& L);
Vec conserved_from_primitive_frozen(const PrimitiveState& w, const Layout& L, const FrozenPair& fp);

/// With `frozen` set, the species heats and formation energies are those of
/// the frozen caloric model: cv_i = r_i/(gamma* - 1), e0_i = e0*.
Vec entropy_vars(const PrimitiveState& w, const GasMixture& mix, const Layout& L,
                 const FrozenPair* frozen = nullptr);
Vec entropy_vars(const Vec& u, const GasMixture& mix, const Layout& L, const FrozenPair& fp);

/// Inverse map v -> u using star heats at T = -1/v_last.
Vec conserved_from_entropy(const Vec& v, const GasMixture& mix, const Layout& L);

struct EntropyPair {
  double U;        // -rho s
  Vector2 flux;    // U * velocity
};
EntropyPair entropy_pair(const PrimitiveState& w, const GasMixture& mix, const Layout& L);

/// psi = r(Y) rho v
Vector2 entropy_potential(const PrimitiveState& w, const GasMixture& mix, const Layout& L);

/// Analytic A0 = du/dv, holding the star heats constant.
Mat entropy_jacobian(const PrimitiveState& w, const GasMixture& mix, const Layout& L,
                     const FrozenPair* frozen = nullptr);

/// Test oracle: central finite differences of conserved_from_entropy around v(u).
Mat entropy_jacobian_fd(const Vec& u, const GasMixture& mix, const Layout& L, const FrozenPair& fp);

/// Star pair of a state evaluated at its own temperature and composition.
FrozenPair own_frozen_pair(const PrimitiveState& w, const GasMixture& mix);

double mixture_r(const PrimitiveState& w, const GasMixture& mix);

}  // namespace esdf
