#include "esdf/solver.hpp"

#include <omp.h>

#include <mutex>
#include <sstream>

namespace esdf {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

int thread_count(const RunConfig& cfg) { return cfg.threads > 0 ? cfg.threads : omp_get_max_threads(); }

/// Collects the first exception thrown inside a parallel region.
class ErrorSlot {
 public:
  void capture() {
    std::lock_guard lock(m_);
    if (!err_) err_ = std::current_exception();
  }
  void rethrow() const {
    if (err_) std::rethrow_exception(err_);
  }

 private:
  std::mutex m_;
  std::exception_ptr err_;
};

FrozenPair mean_pair(const FrozenPair& a, const FrozenPair& b) {
  return {0.5 * (a.gamma_star + b.gamma_star), 0.5 * (a.e0_star + b.e0_star)};
}

Vec ghost_conserved(const PrimitiveState& g, const GasMixture& mix, const RunConfig& cfg,
                    const Layout& L, const FrozenPair& fp) {
  return cfg.double_flux ? conserved_from_primitive_frozen(g, L, fp)
                         : conserved_from_primitive(g, mix, L);
}

/// Evaluates the flux(es) through one face. `fl` is what the left cell
/// sees, `fr` what the right cell sees. Returns true for two distinct
/// evaluations.
bool face_flux(const Face& f, const GasMixture& mix, const RunConfig& cfg, const Layout& L,
               const std::vector<Vec>& u, const std::vector<FrozenPair>& fp,
               const std::vector<PrimitiveState>& prim, Vec& fl, Vec& fr) {
  const bool has_l = f.left >= 0, has_r = f.right >= 0;
  const int inner = has_l ? f.left : f.right;
  const FrozenPair& fp_l = fp[sz(has_l ? f.left : inner)];
  const FrozenPair& fp_r = fp[sz(has_r ? f.right : inner)];

  SideState sl, sr;
  if (has_l) {
    sl.w = prim[sz(f.left)];
    sl.u = u[sz(f.left)];
  } else {
    sl.w = ghost_state(prim[sz(inner)], f.side, cfg, mix, L.dim);
    sl.u = ghost_conserved(sl.w, mix, cfg, L, fp_l);
  }
  if (has_r) {
    sr.w = prim[sz(f.right)];
    sr.u = u[sz(f.right)];
  } else {
    sr.w = ghost_state(prim[sz(inner)], f.side, cfg, mix, L.dim);
    sr.u = ghost_conserved(sr.w, mix, cfg, L, fp_r);
  }

  const auto& opt = cfg.flux;
  const bool uses_pair = opt.scheme == Scheme::esdf_central || opt.scheme == Scheme::esdf;
  if (!uses_pair) {
    fl = numerical_flux(opt, sl, sr, mix, L, f.fn, fp_l);
    fr = fl;
    return false;
  }
  if (!cfg.double_flux) {
    const auto a = face_averages(sl.w, sr.w, L, f.fn, opt.face_pressure);
    const double t_face = 0.5 * (sl.w.T + sr.w.T);
    const FrozenPair fp_face =
        star_properties(mix, t_face, std::span<const double>(a.Y_bar.data(), sz(L.n_species))).frozen();
    FluxOptions control = opt;
    control.dissipation.frozen_eos = false;
    fl = numerical_flux(control, sl, sr, mix, L, f.fn, fp_face);
    fr = fl;
    return false;
  }

  fl = esdf_central_flux(sl.w, sr.w, L, f.fn, fp_l, opt.face_pressure);
  const bool dual = !(fp_l == fp_r);
  fr = dual ? esdf_central_flux(sl.w, sr.w, L, f.fn, fp_r, opt.face_pressure) : fl;
  if (opt.scheme == Scheme::esdf && opt.dissipation.mode != DissipationMode::none) {
    const Vec d = hybrid_dissipation(sl.w, sr.w, mix, L, f.fn, mean_pair(fp_l, fp_r),
                                     opt.dissipation, opt.face_pressure);
    fl -= d;
    fr -= d;
  }
  return dual;
}

[[noreturn]] void rethrow_with_face(const Mesh& mesh, int fi) {
  const auto& f = mesh.faces()[sz(fi)];
  const int c = f.left >= 0 ? f.left : f.right;
  const auto x = mesh.center(c);
  std::ostringstream os;
  try {
    throw;
  } catch (const std::exception& e) {
    os << e.what() << " (face " << fi << " near x=" << x[0] << ", y=" << x[1] << ")";
  }
  throw UnstableStateError(os.str());
}

void prepare(const Mesh& mesh, const Layout& L, ResidualWork& work, std::vector<Vec>& rhs) {
  const auto nf = mesh.faces().size();
  work.flux_l.resize(nf);
  work.flux_r.resize(nf);
  rhs.resize(sz(mesh.size()));
  for (auto& r : rhs)
    if (r.size() != L.nvars()) r = Vec::Zero(L.nvars());
}

Vec boundary_outflow(const Mesh& mesh, const Layout& L, const ResidualWork& work) {
  Vec rate = Vec::Zero(L.nvars());
  const auto& faces = mesh.faces();
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const auto& f = faces[fi];
    if (f.side < 0) continue;
    if (f.left >= 0)
      rate += work.flux_l[fi] * f.fn.area;
    else
      rate -= work.flux_r[fi] * f.fn.area;
  }
  return rate;
}

}  // namespace

BcKind parse_bc(std::string_view name) {
  if (name == "periodic") return BcKind::periodic;
  if (name == "inflow") return BcKind::inflow;
  if (name == "outflow") return BcKind::outflow;
  if (name == "slip-wall" || name == "wall") return BcKind::slip_wall;
  if (name == "symmetry") return BcKind::symmetry;
  throw ConfigError("unknown boundary condition '" + std::string(name) + "'");
}

std::string_view bc_name(BcKind k) {
  switch (k) {
    case BcKind::periodic: return "periodic";
    case BcKind::inflow: return "inflow";
    case BcKind::outflow: return "outflow";
    case BcKind::slip_wall: return "slip-wall";
    case BcKind::symmetry: return "symmetry";
  }
  return "?";
}

PrimitiveState ghost_state(const PrimitiveState& w, int side, const RunConfig& cfg,
                           const GasMixture& mix, int dim) {
  (void)mix;
  switch (cfg.bc[sz(side)]) {
    case BcKind::inflow: return cfg.inflow[sz(side)];
    case BcKind::outflow: return w;
    case BcKind::slip_wall:
    case BcKind::symmetry: {
      PrimitiveState g = w;
      const int axis = side / 2;
      if (axis < dim) g.vel[sz(axis)] = -g.vel[sz(axis)];
      return g;
    }
    case BcKind::periodic: break;
  }
  throw ConfigError("periodic boundary without a matching partner on side " + std::to_string(side));
}

void decode_cells(const Mesh& mesh, const GasMixture& mix, const RunConfig& cfg, const Layout& L,
                  const std::vector<Vec>& u, const std::vector<FrozenPair>& fp,
                  std::vector<PrimitiveState>& prim, long* floored) {
  const int n = mesh.size();
  const bool warm = prim.size() == sz(n);
  prim.resize(sz(n));
  long nfloor = 0;
  ErrorSlot err;
#pragma omp parallel for schedule(static) reduction(+ : nfloor) num_threads(thread_count(cfg))
  for (int c = 0; c < n; ++c) {
    try {
      if (cfg.double_flux) {
        bool fl = false;
        prim[sz(c)] = primitive_from_conserved_frozen(u[sz(c)], mix, L, fp[sz(c)], cfg.p_floor, &fl);
        nfloor += fl ? 1 : 0;
      } else {
        const double guess = warm ? prim[sz(c)].T : 300.0;
        prim[sz(c)] = primitive_from_conserved(u[sz(c)], mix, L, guess);
      }
    } catch (...) {
      err.capture();
    }
  }
  err.rethrow();
  if (floored) *floored += nfloor;
}

void spatial_residual(const Mesh& mesh, const GasMixture& mix, const RunConfig& cfg,
                      const Layout& L, const std::vector<Vec>& u,
                      const std::vector<FrozenPair>& fp, std::vector<Vec>& rhs,
                      ResidualWork& work, Vec* boundary_rate) {
  if (cfg.serial_reference) {
    spatial_residual_serial(mesh, mix, cfg, L, u, fp, rhs, work, boundary_rate);
    return;
  }
  decode_cells(mesh, mix, cfg, L, u, fp, work.prim, &work.floored_cells);
  prepare(mesh, L, work, rhs);
  const auto& faces = mesh.faces();
  const int nf = static_cast<int>(faces.size());
  const int nt = thread_count(cfg);
  long dual = 0;
  ErrorSlot err;
#pragma omp parallel for schedule(static) reduction(+ : dual) num_threads(nt)
  for (int fi = 0; fi < nf; ++fi) {
    try {
      try {
        dual += face_flux(faces[sz(fi)], mix, cfg, L, u, fp, work.prim, work.flux_l[sz(fi)],
                          work.flux_r[sz(fi)])
                    ? 1
                    : 0;
      } catch (...) {
        rethrow_with_face(mesh, fi);
      }
    } catch (...) {
      err.capture();
    }
  }
  err.rethrow();
  work.dual_evaluations += dual;

  const int n = mesh.size();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int c = 0; c < n; ++c) {
    Vec acc = Vec::Zero(L.nvars());
    for (const auto& [fi, s] : mesh.cell_faces(c)) {
      const auto& f = faces[sz(fi)];
      if (s > 0)
        acc -= work.flux_l[sz(fi)] * f.fn.area;
      else
        acc += work.flux_r[sz(fi)] * f.fn.area;
    }
    rhs[sz(c)] = acc / mesh.volume(c);
  }
  if (boundary_rate) *boundary_rate = boundary_outflow(mesh, L, work);
}

void spatial_residual_serial(const Mesh& mesh, const GasMixture& mix, const RunConfig& cfg,
                             const Layout& L, const std::vector<Vec>& u,
                             const std::vector<FrozenPair>& fp, std::vector<Vec>& rhs,
                             ResidualWork& work, Vec* boundary_rate) {
  RunConfig serial = cfg;
  serial.threads = 1;
  decode_cells(mesh, mix, serial, L, u, fp, work.prim, &work.floored_cells);
  prepare(mesh, L, work, rhs);
  for (auto& r : rhs) r.setZero();
  const auto& faces = mesh.faces();
  for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
    const auto& f = faces[sz(fi)];
    try {
      if (face_flux(f, mix, cfg, L, u, fp, work.prim, work.flux_l[sz(fi)], work.flux_r[sz(fi)]))
        ++work.dual_evaluations;
    } catch (...) {
      rethrow_with_face(mesh, fi);
    }
    if (f.left >= 0) rhs[sz(f.left)] -= work.flux_l[sz(fi)] * (f.fn.area / mesh.volume(f.left));
    if (f.right >= 0) rhs[sz(f.right)] += work.flux_r[sz(fi)] * (f.fn.area / mesh.volume(f.right));
  }
  if (boundary_rate) *boundary_rate = boundary_outflow(mesh, L, work);
}

}  // namespace esdf
