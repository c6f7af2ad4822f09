#include "esdf/solver.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace esdf {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

}  // namespace

double compute_dt(const Mesh& mesh, const GasMixture& mix, const RunConfig& cfg, const Layout& L,
                  const SolverState& s) {
  if (cfg.dt_fixed > 0.0) return cfg.dt_fixed;
  std::vector<PrimitiveState> prim;
  decode_cells(mesh, mix, cfg, L, s.u, s.fp, prim);
  double dt = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.size(); ++c) {
    const auto& w = prim[sz(c)];
    const double lam = std::sqrt(w.speed2(L.dim)) + w.sound_speed();
    dt = std::min(dt, mesh.min_h(c) / lam);
  }
  dt *= cfg.cfl;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw UnstableStateError("compute_dt: invalid time step");
  return dt;
}

std::vector<FrozenPair> initial_frozen_pairs(const Mesh& mesh, const GasMixture& mix,
                                             const RunConfig& cfg, const Layout& L,
                                             const std::vector<Vec>& u) {
  (void)cfg;
  std::vector<FrozenPair> fp(u.size());
  for (int c = 0; c < mesh.size(); ++c)
    fp[sz(c)] = own_frozen_pair(primitive_from_conserved(u[sz(c)], mix, L), mix);
  return fp;
}

long double_flux_resync(const GasMixture& mix, const RunConfig& cfg, const Layout& L,
                        SolverState& s) {
  long changed = 0;
  const int n = static_cast<int>(s.u.size());
  for (int c = 0; c < n; ++c) {
    auto& u = s.u[sz(c)];
    if (!cfg.double_flux) {
      const auto w = primitive_from_conserved(u, mix, L);
      s.fp[sz(c)] = own_frozen_pair(w, mix);
      continue;
    }
    const auto w = primitive_from_conserved_frozen(u, mix, L, s.fp[sz(c)], cfg.p_floor);
    const FrozenPair next = own_frozen_pair(w, mix);
    if (next == s.fp[sz(c)]) continue;
    ++changed;
    if (cfg.resync_rewrite_energy)
      u(L.energy()) = caloric_internal_energy(w.rho, w.p, next) + 0.5 * w.rho * w.speed2(L.dim);
    s.fp[sz(c)] = next;
  }
  return changed;
}

Solver::Solver(Mesh mesh, GasMixture mix, RunConfig cfg, SolverState init)
    : mesh_(std::move(mesh)),
      mix_(std::move(mix)),
      cfg_(std::move(cfg)),
      L_(layout_for(mix_, mesh_.dim())),
      state_(std::move(init)) {
  if (state_.u.size() != sz(mesh_.size())) throw ConfigError("initial state size does not match mesh");
  if (state_.fp.size() != state_.u.size())
    state_.fp = initial_frozen_pairs(mesh_, mix_, cfg_, L_, state_.u);
  if (!(cfg_.dt_fixed > 0.0) && !(cfg_.cfl > 0.0 && cfg_.cfl <= 1.0))
    throw ConfigError("CFL must be in (0, 1]");
  for (auto& g : cfg_.inflow) {
    if (g.rho > 0.0 && g.T > 0.0) complete_thermo(g, mix_);
  }
  outflow_ = Vec::Zero(L_.nvars());
  initial_ = totals();
}

double Solver::compute_dt() const { return esdf::compute_dt(mesh_, mix_, cfg_, L_, state_); }

void Solver::residual(const std::vector<Vec>& u, std::vector<Vec>& rhs, Vec* rate) {
  spatial_residual(mesh_, mix_, cfg_, L_, u, state_.fp, rhs, work_, rate);
}

void Solver::rk3(double dt) {
  const std::size_t n = state_.u.size();
  u0_ = state_.u;
  u1_.resize(n);
  Vec b0, b1, b2;
  residual(u0_, rhs_, &b0);
  for (std::size_t c = 0; c < n; ++c) u1_[c] = u0_[c] + dt * rhs_[c];
  residual(u1_, rhs_, &b1);
  for (std::size_t c = 0; c < n; ++c) u1_[c] = 0.75 * u0_[c] + 0.25 * (u1_[c] + dt * rhs_[c]);
  residual(u1_, rhs_, &b2);
  std::vector<Vec> next(n);
  for (std::size_t c = 0; c < n; ++c)
    next[c] = (1.0 / 3.0) * u0_[c] + (2.0 / 3.0) * (u1_[c] + dt * rhs_[c]);

  SolverState trial = state_;
  trial.u = std::move(next);
  double_flux_resync(mix_, cfg_, L_, trial);
  state_ = std::move(trial);
  outflow_ += dt * (b0 / 6.0 + b1 / 6.0 + (2.0 / 3.0) * b2);
}

double Solver::step(double dt) {
  try {
    rk3(dt);
  } catch (const UnstableStateError&) {
    ++retries_;
    dt *= 0.5;
    try {
      rk3(dt);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "step " << state_.step << " at t=" << state_.t << " failed after retry with dt=" << dt
         << ": " << e.what();
      throw UnstableStateError(os.str());
    }
  } catch (const ThermoError&) {
    ++retries_;
    dt *= 0.5;
    rk3(dt);
  }
  state_.t += dt;
  ++state_.step;
  return dt;
}

void Solver::regrid() {
  if (cfg_.amr.max_levels <= 0 || mesh_.max_level() <= 0) return;
  std::vector<double> rho(state_.u.size());
  for (std::size_t c = 0; c < rho.size(); ++c) rho[c] = state_.u[c](L_.rho());
  const auto e = mesh_.refinement_indicator(rho);
  const auto flags = mesh_.flags_from_indicator(e, cfg_.amr.e_ref);
  const auto remap = mesh_.adapt(flags);

  std::vector<Vec> u = apply_remap(remap, state_.u);
  std::vector<FrozenPair> fp(remap.size());
  for (std::size_t c = 0; c < remap.size(); ++c) {
    double m = 0.0, g = 0.0, e0 = 0.0;
    for (const auto& [old, w] : remap[c]) {
      const double mw = w * state_.u[sz(old)](L_.rho());
      m += mw;
      g += mw * state_.fp[sz(old)].gamma_star;
      e0 += mw * state_.fp[sz(old)].e0_star;
    }
    fp[c] = remap[c].size() == 1 ? state_.fp[sz(remap[c].front().first)] : FrozenPair{g / m, e0 / m};
  }
  state_.u = std::move(u);
  state_.fp = std::move(fp);
  work_.prim.clear();
}

void Solver::run(const std::function<void(const Solver&)>& observer) {
  const double tol = 1e-12 * std::max(cfg_.t_end, 1e-300);
  while (state_.t < cfg_.t_end - tol && state_.step < cfg_.max_steps) {
    double dt = compute_dt();
    dt = std::min(dt, cfg_.t_end - state_.t);
    step(dt);
    if (cfg_.amr.max_levels > 0 && cfg_.amr.regrid_interval > 0 &&
        state_.step % cfg_.amr.regrid_interval == 0)
      regrid();
    if (observer) observer(*this);
  }
}

std::vector<PrimitiveState> Solver::primitives() const {
  std::vector<PrimitiveState> prim;
  decode_cells(mesh_, mix_, cfg_, L_, state_.u, state_.fp, prim);
  return prim;
}

ConservationTotals Solver::totals() const {
  ConservationTotals t;
  t.totals = Vec::Zero(L_.nvars());
  t.outflow = outflow_;
  const auto prim = primitives();
  for (int c = 0; c < mesh_.size(); ++c) {
    const double v = mesh_.volume(c);
    t.totals += state_.u[sz(c)] * v;
    t.entropy += entropy_pair(prim[sz(c)], mix_, L_).U * v;
  }
  return t;
}

}  // namespace esdf
