#include "esdf/entropy_state.hpp"

#include <algorithm>
#include <cmath>

namespace esdf {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

void fill_composition(PrimitiveState& w, const SpeciesArray& rho_i, int n) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = std::clamp(rho_i[sz(i)] / w.rho, 0.0, 1.0);
    w.Y[sz(i)] = y;
    sum += y;
  }
  for (int i = 0; i < n; ++i) w.Y[sz(i)] /= sum;
}

/// Species heat and formation energy, optionally from the frozen model.
double heat_of(const PrimitiveState& w, const GasMixture& mix, int i, const FrozenPair* fz) {
  return fz ? mix.r(i) / (fz->gamma_star - 1.0) : w.cv[sz(i)];
}
double e0_of(const GasMixture& mix, int i, const FrozenPair* fz) {
  return fz ? fz->e0_star : mix.e0(i);
}

}  // namespace

double mixture_r(const PrimitiveState& w, const GasMixture& mix) {
  double r = 0.0;
  for (int i = 0; i < mix.size(); ++i) r += w.Y[sz(i)] * mix.r(i);
  return r;
}

SpeciesArray partial_densities(const Vec& u, const Layout& L) {
  SpeciesArray rho_i{};
  const double rho = u(L.rho());
  double acc = 0.0;
  for (int i = 0; i < L.n_species - 1; ++i) {
    rho_i[sz(i)] = std::max(u(i), 0.0);
    acc += rho_i[sz(i)];
  }
  rho_i[sz(L.n_species - 1)] = std::max(rho - acc, 0.0);
  return rho_i;
}

void complete_thermo(PrimitiveState& w, const GasMixture& mix) {
  double cp = 0.0, r = 0.0;
  for (int i = 0; i < mix.size(); ++i) {
    w.cv[sz(i)] = mix.species(i).cv_star(w.T);
    cp += w.Y[sz(i)] * (w.cv[sz(i)] + mix.r(i));
    r += w.Y[sz(i)] * mix.r(i);
  }
  w.gamma = cp / (cp - r);
}

PrimitiveState make_state(const GasMixture& mix, double rho, std::span<const double> Y,
                          const Vector2& vel, double p) {
  PrimitiveState w;
  w.rho = rho;
  for (int i = 0; i < mix.size(); ++i) w.Y[sz(i)] = Y[sz(i)];
  w.vel = vel;
  w.p = p;
  w.T = p / (rho * mixture_r(w, mix));
  complete_thermo(w, mix);
  return w;
}

PrimitiveState primitive_from_conserved(const Vec& u, const GasMixture& mix, const Layout& L,
                                        double t_guess) {
  PrimitiveState w;
  w.rho = u(L.rho());
  if (!(w.rho > 0.0)) throw ThermoError("non-positive density");
  const auto rho_i = partial_densities(u, L);
  fill_composition(w, rho_i, L.n_species);
  double ke = 0.0;
  for (int k = 0; k < L.dim; ++k) {
    w.vel[sz(k)] = u(L.mom(k)) / w.rho;
    ke += 0.5 * u(L.mom(k)) * w.vel[sz(k)];
  }
  SpeciesArray rho_y{};
  for (int i = 0; i < L.n_species; ++i) rho_y[sz(i)] = w.rho * w.Y[sz(i)];
  w.T = temperature_from_energy(mix, u(L.energy()) - ke,
                                std::span<const double>(rho_y.data(), sz(L.n_species)), t_guess);
  w.p = mixture_r(w, mix) * w.rho * w.T;
  complete_thermo(w, mix);
  return w;
}

PrimitiveState primitive_from_conserved_frozen(const Vec& u, const GasMixture& mix,
                                               const Layout& L, const FrozenPair& fp,
                                               double p_floor, bool* floored) {
  PrimitiveState w;
  w.rho = u(L.rho());
  if (!(w.rho > 0.0) || !std::isfinite(w.rho)) throw UnstableStateError("non-positive density");
  const auto rho_i = partial_densities(u, L);
  fill_composition(w, rho_i, L.n_species);
  double ke = 0.0;
  for (int k = 0; k < L.dim; ++k) {
    w.vel[sz(k)] = u(L.mom(k)) / w.rho;
    ke += 0.5 * u(L.mom(k)) * w.vel[sz(k)];
  }
  w.p = caloric_pressure(w.rho, u(L.energy()) - ke, fp, p_floor, floored);
  if (!(w.p > 0.0) || !std::isfinite(w.p)) throw UnstableStateError("non-positive pressure");
  w.T = w.p / (w.rho * mixture_r(w, mix));
  for (int i = 0; i < mix.size(); ++i) w.cv[sz(i)] = mix.species(i).cv_star(w.T);
  w.gamma = fp.gamma_star;
  return w;
}

Vec conserved_from_primitive(const PrimitiveState& w, const GasMixture& mix, const Layout& L) {
  Vec u(L.nvars());
  SpeciesArray rho_y{};
  for (int i = 0; i < L.n_species; ++i) rho_y[sz(i)] = w.rho * w.Y[sz(i)];
  for (int i = 0; i < L.n_species - 1; ++i) u(i) = rho_y[sz(i)];
  u(L.rho()) = w.rho;
  for (int k = 0; k < L.dim; ++k) u(L.mom(k)) = w.rho * w.vel[sz(k)];
  u(L.energy()) =
      energy_from_temperature(mix, std::span<const double>(rho_y.data(), sz(L.n_species)), w.T) +
      0.5 * w.rho * w.speed2(L.dim);
  return u;
}

Vec conserved_from_primitive_frozen(const PrimitiveState& w, const Layout& L,
                                    const FrozenPair& fp) {
  Vec u(L.nvars());
  for (int i = 0; i < L.n_species - 1; ++i) u(i) = w.rho * w.Y[sz(i)];
  u(L.rho()) = w.rho;
  for (int k = 0; k < L.dim; ++k) u(L.mom(k)) = w.rho * w.vel[sz(k)];
  u(L.energy()) = caloric_internal_energy(w.rho, w.p, fp) + 0.5 * w.rho * w.speed2(L.dim);
  return u;
}

FrozenPair own_frozen_pair(const PrimitiveState& w, const GasMixture& mix) {
  return star_properties(mix, w.T, std::span<const double>(w.Y.data(), sz(mix.size()))).frozen();
}

Vec entropy_vars(const PrimitiveState& w, const GasMixture& mix, const Layout& L,
                 const FrozenPair* frozen) {
  const int n = L.n_species;
  const double theta = 1.0 / w.T;
  const double lnT = std::log(w.T);
  // theta * g_i with star heats: theta e0_i + cv_i + r_i - cv_i ln T + r_i ln rho_i
  SpeciesArray tg{};
  for (int i = 0; i < n; ++i) {
    const double ri = mix.r(i);
    const double cv = heat_of(w, mix, i, frozen);
    tg[sz(i)] = theta * e0_of(mix, i, frozen) + cv + ri - cv * lnT +
                ri * floored_log_density(w.rho, w.Y[sz(i)]);
  }
  Vec v(L.nvars());
  for (int i = 0; i < n - 1; ++i) v(i) = tg[sz(i)] - tg[sz(n - 1)];
  v(L.rho()) = tg[sz(n - 1)] - 0.5 * theta * w.speed2(L.dim);
  for (int k = 0; k < L.dim; ++k) v(L.mom(k)) = theta * w.vel[sz(k)];
  v(L.energy()) = -theta;
  return v;
}

Vec entropy_vars(const Vec& u, const GasMixture& mix, const Layout& L, const FrozenPair& fp) {
  return entropy_vars(primitive_from_conserved_frozen(u, mix, L, fp), mix, L);
}

Vec conserved_from_entropy(const Vec& v, const GasMixture& mix, const Layout& L) {
  const int n = L.n_species;
  const double w_e = v(L.energy());
  if (!(w_e < 0.0)) throw DomainError("conserved_from_entropy: last component must be negative");
  const double theta = -w_e;
  const double T = 1.0 / theta;
  Vector2 vel{0.0, 0.0};
  double v2 = 0.0;
  for (int k = 0; k < L.dim; ++k) {
    vel[sz(k)] = T * v(L.mom(k));
    v2 += vel[sz(k)] * vel[sz(k)];
  }
  const double tg_n = v(L.rho()) + 0.5 * theta * v2;
  const double lnT = std::log(T);

  Vec u(L.nvars());
  double rho = 0.0, rho_e = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& sp = mix.species(i);
    const double ri = mix.r(i);
    const double cv = sp.cv_star(T);
    const double tg = (i < n - 1 ? v(i) : 0.0) + tg_n;
    // s_i = e0_i theta + cp_i - theta g_i ;  ln rho_i = (cv_i ln T - s_i) / r_i
    const double s = sp.e0 * theta + cv + ri - tg;
    const double expo = (cv * lnT - s) / ri;
    if (expo > 700.0) throw DomainError("conserved_from_entropy: density overflow");
    const double rho_i = std::exp(expo);
    if (i < n - 1) u(i) = rho_i;
    rho += rho_i;
    rho_e += rho_i * (sp.e0 + cv * T);
  }
  u(L.rho()) = rho;
  for (int k = 0; k < L.dim; ++k) u(L.mom(k)) = rho * vel[sz(k)];
  u(L.energy()) = rho_e + 0.5 * rho * v2;
  return u;
}

EntropyPair entropy_pair(const PrimitiveState& w, const GasMixture& mix, const Layout& L) {
  const double s =
      mixture_entropy(mix, w.rho, w.T, std::span<const double>(w.Y.data(), sz(L.n_species)));
  EntropyPair out{-w.rho * s, {0.0, 0.0}};
  for (int k = 0; k < L.dim; ++k) out.flux[sz(k)] = out.U * w.vel[sz(k)];
  return out;
}

Vector2 entropy_potential(const PrimitiveState& w, const GasMixture& mix, const Layout& L) {
  const double r = mixture_r(w, mix);
  Vector2 psi{0.0, 0.0};
  for (int k = 0; k < L.dim; ++k) psi[sz(k)] = r * w.rho * w.vel[sz(k)];
  return psi;
}

Mat entropy_jacobian(const PrimitiveState& w, const GasMixture& mix, const Layout& L,
                     const FrozenPair* frozen) {
  // Differentiate u(v) through ln rho_i = phi_i(v):
  //   dphi_i/dv_k = delta_ik / r_i (k < n),  dphi_i/dv_rho = 1/r_i,
  //   dphi_i/dv_m = vel / r_i,  dphi_i/dv_E = (e_i + |vel|^2/2) / r_i
  const int n = L.n_species;
  const int d = L.dim;
  const int nv = L.nvars();
  const double T = w.T;
  const double v2 = w.speed2(d);

  Mat drho_i(n, nv);  // row i: gradient of rho_i
  drho_i.setZero();
  SpeciesArray e{};
  for (int i = 0; i < n; ++i) {
    const double ri = mix.r(i);
    const double rho_i = floored_partial_density(w.rho, w.Y[sz(i)]);
    e[sz(i)] = e0_of(mix, i, frozen) + heat_of(w, mix, i, frozen) * T;
    if (i < n - 1) drho_i(i, i) = rho_i / ri;
    drho_i(i, L.rho()) = rho_i / ri;
    for (int k = 0; k < d; ++k) drho_i(i, L.mom(k)) = rho_i * w.vel[sz(k)] / ri;
    drho_i(i, L.energy()) = rho_i * (e[sz(i)] + 0.5 * v2) / ri;
  }

  Vec drho = drho_i.colwise().sum().transpose();
  // vel = T w_m: dvel_k/dw_m_k = T, dvel_k/dw_E = vel_k T;  dT/dw_E = T^2
  Mat A0(nv, nv);
  A0.setZero();
  for (int i = 0; i < n - 1; ++i) A0.row(i) = drho_i.row(i);
  A0.row(L.rho()) = drho.transpose();
  double rho_cv = 0.0;
  for (int i = 0; i < n; ++i)
    rho_cv += floored_partial_density(w.rho, w.Y[sz(i)]) * heat_of(w, mix, i, frozen);
  const double rho = w.rho;
  for (int k = 0; k < d; ++k) {
    const double vk = w.vel[sz(k)];
    A0.row(L.mom(k)) = vk * drho.transpose();
    A0(L.mom(k), L.mom(k)) += rho * T;
    A0(L.mom(k), L.energy()) += rho * vk * T;
  }
  // rho E = sum rho_i e_i(T) + rho |vel|^2 / 2
  for (int i = 0; i < n; ++i) A0.row(L.energy()) += e[sz(i)] * drho_i.row(i);
  A0.row(L.energy()) += 0.5 * v2 * drho.transpose();
  A0(L.energy(), L.energy()) += rho_cv * T * T;
  for (int k = 0; k < d; ++k) {
    const double vk = w.vel[sz(k)];
    A0(L.energy(), L.mom(k)) += rho * vk * T;
    A0(L.energy(), L.energy()) += rho * vk * vk * T;
  }
  return A0;
}

Mat entropy_jacobian_fd(const Vec& u, const GasMixture& mix, const Layout& L,
                        const FrozenPair& fp) {
  const Vec v0 = entropy_vars(u, mix, L, fp);
  const int nv = L.nvars();
  Mat A(nv, nv);
  const auto w = primitive_from_conserved_frozen(u, mix, L, fp);
  // Component scales for near-zero entries: O(1) for the mass entries,
  // theta c for the momentum entries.
  auto floor_of = [&](int j) {
    if (j >= L.mom(0) && j < L.energy()) return std::abs(v0(L.energy())) * w.sound_speed();
    return 1.0;
  };
  // Fourth-order central stencil, step relative to each component.
  auto at = [&](int j, double dh) {
    Vec v = v0;
    v(j) += dh;
    return conserved_from_entropy(v, mix, L);
  };
  for (int j = 0; j < nv; ++j) {
    // Rescale a trial step so that u moves by about 1e-3 relative.
    const double h0 = 1e-6 * std::max(std::abs(v0(j)), floor_of(j));
    const double moved = ((at(j, h0) - u).array() / u.array().abs().max(1e-300)).abs().maxCoeff();
    const double h = moved > 0.0 ? h0 * 1e-3 / moved : h0;
    A.col(j) = (8.0 * (at(j, h) - at(j, -h)) - (at(j, 2.0 * h) - at(j, -2.0 * h))) / (12.0 * h);
    if (!A.col(j).allFinite()) throw std::runtime_error("entropy_jacobian_fd: step-size breakdown");
  }
  return A;
}

}  // namespace esdf
