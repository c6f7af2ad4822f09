#include "esdf/driver.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>

namespace esdf {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

bool uniform_pv(const std::vector<PrimitiveState>& prim, int dim) {
  for (const auto& w : prim) {
    if (std::abs(w.p - prim.front().p) > 1e-12 * std::abs(prim.front().p)) return false;
    for (int k = 0; k < dim; ++k)
      if (std::abs(w.vel[sz(k)] - prim.front().vel[sz(k)]) > 1e-12 * (1.0 + std::abs(prim.front().vel[sz(k)])))
        return false;
  }
  return true;
}

std::vector<double> species_field(const Solver& s, int species) {
  const auto& L = s.layout();
  std::vector<double> y(s.state().u.size());
  for (std::size_t c = 0; c < y.size(); ++c) y[c] = partial_densities(s.state().u[c], L)[sz(species)] / s.state().u[c](L.rho());
  return y;
}

}  // namespace

std::vector<std::string> conserved_names(const GasMixture& mix, int dim) {
  std::vector<std::string> n;
  for (int i = 0; i + 1 < mix.size(); ++i) n.push_back("rhoY_" + mix.species(i).name);
  n.push_back("rho");
  n.push_back("mom_x");
  if (dim == 2) n.push_back("mom_y");
  n.push_back("rhoE");
  return n;
}

double shock_front_level(const CaseSetup& s) {
  const auto mix = GasMixture::from_names(std::span<const std::string>(s.species));
  const double p_post = s.run.inflow[kXHi].p;
  const double p_pre = s.init(mix, {s.mesh.x0, s.mesh.y1}).p;
  return 0.5 * (p_pre + p_post);
}

RunResult run_request(const RunRequest& req, const RunHooks& hooks) {
  const auto& setup = req.setup;
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  Solver solver = build_solver(setup);
  const auto& mix = solver.mixture();
  const auto& L = solver.layout();
  const int dim = solver.mesh().dim();
  const std::string hash = hash_hex(config_hash(req));
  OutputHeader hdr{"series", hash, req.seed};

  std::unique_ptr<CsvWriter> series;
  const auto init_prim = solver.primitives();
  res.uniform_start = uniform_pv(init_prim, dim);
  const double p0 = init_prim.front().p;
  const auto v0 = init_prim.front().vel;
  const double vref = std::max(std::sqrt(v0[0] * v0[0] + v0[1] * v0[1]), 1e-300);
  const int he = mix.index_of("He");
  const bool track = dim == 2 && he >= 0;
  const double front_level = track && setup.run.bc[kXHi] == BcKind::inflow ? shock_front_level(setup) : 0.0;

  if (hooks.write_files) {
    ensure_directory(req.output.dir);
    auto cols = std::vector<std::string>{"t", "dt", "S", "dS"};
    for (auto& n : conserved_names(mix, dim)) cols.push_back("total_" + n);
    if (res.uniform_start) cols.insert(cols.end(), {"p_max_dev", "v_max_dev"});
    if (track) cols.insert(cols.end(), {"downstream", "jet", "upstream", "shock_x"});
    series = std::make_unique<CsvWriter>(req.output.dir + "/" + setup.id + "_series.csv", hdr, cols);
  }

  res.S0 = solver.initial_totals().entropy;
  const Vec M0 = solver.initial_totals().totals;
  double last_dt = 0.0;
  auto snapshot = [&](const std::string& tag) {
    if (!hooks.write_files) return;
    OutputHeader sh{"snapshot", hash, req.seed};
    const std::string base = req.output.dir + "/" + setup.id + "_" + tag;
    if (dim == 1) write_snapshot_csv(base + ".csv", sh, solver);
    else write_snapshot_vtk(base + ".vtk", sh, solver);
  };

  auto record = [&](const Solver& s) {
    const bool want_row = series && (s.state().step % req.output.series_interval == 0 || s.state().t >= setup.run.t_end);
    const bool want_dev = res.uniform_start;
    if (!want_row && !want_dev && !track) return;
    const auto prim = s.primitives();
    double pd = 0.0, vd = 0.0;
    if (want_dev) {
      for (const auto& w : prim) {
        pd = std::max(pd, std::abs(w.p - p0) / p0);
        double dv2 = 0.0;
        for (int k = 0; k < dim; ++k) dv2 += (w.vel[sz(k)] - v0[sz(k)]) * (w.vel[sz(k)] - v0[sz(k)]);
        vd = std::max(vd, std::sqrt(dv2) / vref);
      }
      res.p_max_dev = std::max(res.p_max_dev, pd);
      res.v_max_dev = std::max(res.v_max_dev, vd);
    }
    std::array<double, 4> tr{s.state().t, NAN, NAN, NAN};
    double shock_x = NAN;
    if (track) {
      const auto y = species_field(s, he);
      const auto it = track_interface_points(s.mesh(), y);
      if (it.valid) tr = {s.state().t, it.downstream, it.jet, it.upstream};
      res.track.push_back(tr);
      if (front_level > 0.0) {
        std::vector<double> p(prim.size());
        for (std::size_t c = 0; c < p.size(); ++c) p[c] = prim[c].p;
        if (auto x = front_position(s.mesh(), p, front_level)) {
          shock_x = *x;
          res.shock_front.emplace_back(s.state().t, *x);
        }
      }
    }
    if (!want_row) return;
    const auto tot = s.totals();
    std::vector<double> row{s.state().t, last_dt, tot.entropy, tot.entropy - res.S0};
    for (int k = 0; k < L.nvars(); ++k) row.push_back(tot.totals(k));
    if (res.uniform_start) row.insert(row.end(), {pd, vd});
    if (track) row.insert(row.end(), {tr[1], tr[2], tr[3], shock_x});
    series->row(row);
  };

  record(solver);
  long next_snapshot = req.output.snapshot_interval;
  try {
    const double tol = 1e-12 * setup.run.t_end;
    while (solver.state().t < setup.run.t_end - tol && solver.state().step < setup.run.max_steps) {
      double dt = std::min(solver.compute_dt(), setup.run.t_end - solver.state().t);
      last_dt = solver.step(dt);
      const auto& amr = setup.run.amr;
      if (amr.max_levels > 0 && amr.regrid_interval > 0 && solver.state().step % amr.regrid_interval == 0)
        solver.regrid();
      record(solver);
      if (hooks.observer) hooks.observer(solver);
      if (req.output.snapshot_interval > 0 && solver.state().step >= next_snapshot) {
        snapshot("step" + std::to_string(solver.state().step));
        next_snapshot += req.output.snapshot_interval;
      }
      if (hooks.log && solver.state().step % 1000 == 0)
        *hooks.log << "step=" << solver.state().step << " t=" << solver.state().t << '\n';
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    res.ok = false;
    res.message = e.what();
  }

  const auto fin = solver.totals();
  res.steps = solver.state().step;
  res.t = solver.state().t;
  res.S = fin.entropy;
  res.dS = fin.entropy - res.S0;
  res.retries = solver.retries();
  res.floored = solver.floored_cells();
  const Vec net = fin.totals + fin.outflow - M0;
  for (int i = 0; i < mix.size(); ++i) {
    const double m0 = i + 1 < mix.size() ? M0(i) : M0(L.rho()) - M0.head(L.rho()).sum();
    const double dm = i + 1 < mix.size() ? net(i) : net(L.rho()) - net.head(L.rho()).sum();
    res.mass_rel_err.push_back(m0 > 0.0 ? std::abs(dm) / m0 : std::abs(dm));
  }
  res.mass_rel_err.push_back(std::abs(net(L.rho())) / M0(L.rho()));
  if (res.ok) snapshot("final");
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Summary sm;
  sm.add("kind", std::string("run")).add("case", setup.id)
      .add("scheme", std::string(scheme_name(setup.run.flux.scheme)))
      .add("double_flux", setup.run.double_flux)
      .add("status", std::string(res.ok ? "ok" : "unstable"))
      .add("steps", res.steps).add("t", res.t).add("cells", static_cast<long>(solver.mesh().size()))
      .add("dS", res.dS);
  if (res.uniform_start) sm.add("p_max_dev", res.p_max_dev).add("v_max_dev", res.v_max_dev);
  double worst = 0.0;
  for (double e : res.mass_rel_err) worst = std::max(worst, e);
  sm.add("mass_rel_err", worst).add("retries", res.retries).add("floored", res.floored)
      .add("wall_s", res.wall_seconds).add("config_hash", hash)
      .add("seed", static_cast<long>(req.seed)).add("version", std::string(ESDF_VERSION));
  res.summary = sm.line();
  if (!res.ok && hooks.log) *hooks.log << "error: " << res.message << '\n';
  return res;
}

}  // namespace esdf
