#include "esdf/cases.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace esdf {

namespace {

PrimitiveState state_rho_p(const GasMixture& mix, double rho, std::vector<double> Y, double p,
                           Vector2 vel = {0.0, 0.0}) {
  return make_state(mix, rho, Y, vel, p);
}

PrimitiveState state_p_T(const GasMixture& mix, std::vector<double> Y, double p, double T,
                         Vector2 vel) {
  const double r = mixture_gas_constant(mix, Y);
  return make_state(mix, p / (r * T), Y, vel, p);
}

}  // namespace

std::string canonical_case_id(std::string_view id) {
  for (const char* k : {"res1", "res2", "res3"})
    if (id.substr(0, 4) == k) return k;
  throw ConfigError("unknown case '" + std::string(id) + "' (expected res1|res2|res3)");
}

CaseSetup res1_setup() {
  CaseSetup s;
  s.id = "res1";
  s.mesh = {.dim = 1, .nx = 500, .ny = 1, .x0 = -1.0, .x1 = 1.0, .periodic_x = true};
  s.species = {"ideal"};
  s.run.flux.scheme = Scheme::esdf_central;
  s.run.t_end = 2.0;
  s.run.p_floor = 1e-8;
  s.init = [](const GasMixture& mix, const Vector2& x) {
    const double rho = std::abs(x[0]) < 0.5 ? 3.0 : 2.0;
    return state_rho_p(mix, rho, {1.0}, std::pow(rho, 1.4));
  };
  return s;
}

CaseSetup res2_setup() {
  CaseSetup s;
  s.id = "res2";
  s.mesh = {.dim = 1, .nx = 1000, .ny = 1, .x0 = -0.05, .x1 = 0.5, .periodic_x = true};
  s.species = {"H2", "N2"};
  s.run.flux.scheme = Scheme::esdf;
  s.run.t_end = 1e-3;
  s.run.p_floor = 1e-8 * 101325.0;
  s.init = [](const GasMixture& mix, const Vector2& x) {
    const bool h2 = x[0] > 0.0 && x[0] < 0.05;
    return state_p_T(mix, {h2 ? 1.0 : 0.0, h2 ? 0.0 : 1.0}, 101325.0, 300.0, {100.0, 0.0});
  };
  return s;
}

CaseSetup res3_setup() {
  CaseSetup s;
  s.id = "res3";
  s.mesh = {.dim = 2, .nx = 650, .ny = 91, .x0 = 0.0, .x1 = 0.325, .y0 = 0.0, .y1 = 0.0455,
            .max_level = 1};
  s.species = {"N2", "O2", "He"};
  s.run.flux.scheme = Scheme::esdf;
  s.run.t_end = 850e-6;
  s.run.p_floor = 1e-8 * 1e5;
  s.run.bc = {BcKind::outflow, BcKind::inflow, BcKind::symmetry, BcKind::slip_wall};
  s.run.amr.max_levels = 1;
  s.run.amr.e_ref = 0.1;
  s.run.amr.regrid_interval = 10;

  // Table values for density and pressure; temperatures follow from the
  // equation of state. Air mass fractions are the table's, as printed.
  const auto mix = GasMixture::from_names({"N2", "O2", "He"});
  const std::vector<double> y_air{0.215, 0.785, 0.0};
  const auto pre = state_rho_p(mix, 1.29, y_air, 1e5);
  const auto post = normal_shock_state(1.22, pre, mix, 1.4);
  const auto helium = state_rho_p(mix, 0.2347, {0.0, 0.0, 1.0}, 1e5);
  s.run.inflow[kXHi] = post;

  constexpr double shock_x = 0.225, bubble_x = 0.175, radius = 0.025;
  s.init = [pre, post, helium](const GasMixture&, const Vector2& x) {
    if (x[0] > shock_x) return post;
    const double dx = x[0] - bubble_x, dy = x[1];
    if (dx * dx + dy * dy < radius * radius) return helium;
    return pre;
  };
  return s;
}

CaseSetup make_case(std::string_view id) {
  const auto k = canonical_case_id(id);
  if (k == "res1") return res1_setup();
  if (k == "res2") return res2_setup();
  return res3_setup();
}

std::vector<Vec> initialize(const Mesh& mesh, const GasMixture& mix, const CaseSetup& setup) {
  const Layout L = layout_for(mix, mesh.dim());
  std::vector<Vec> u(static_cast<std::size_t>(mesh.size()));
  for (int c = 0; c < mesh.size(); ++c)
    u[static_cast<std::size_t>(c)] = conserved_from_primitive(setup.init(mix, mesh.center(c)), mix, L);
  return u;
}

Solver build_solver(const CaseSetup& setup) {
  auto mix = GasMixture::from_names(std::span<const std::string>(setup.species));
  MeshSpec ms = setup.mesh;
  ms.max_level = std::max(ms.max_level, setup.run.amr.max_levels);
  if (setup.run.amr.max_levels <= 0) ms.max_level = 0;
  Mesh mesh(ms);
  const Layout L = layout_for(mix, mesh.dim());
  for (int pass = 0; pass < ms.max_level; ++pass) {
    const auto u = initialize(mesh, mix, setup);
    std::vector<double> rho(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) rho[c] = u[c](L.rho());
    const auto e = mesh.refinement_indicator(rho);
    std::vector<int> flags(e.size(), 0);
    for (std::size_t c = 0; c < e.size(); ++c) flags[c] = e[c] > setup.run.amr.e_ref ? 1 : 0;
    mesh.adapt(flags);
  }
  SolverState st;
  st.u = initialize(mesh, mix, setup);
  return Solver(std::move(mesh), std::move(mix), setup.run, std::move(st));
}

NormalShock normal_shock_ratios(double M1, double gamma) {
  if (!(M1 > 1.0)) throw DomainError("normal shock needs M1 > 1");
  const double m2 = M1 * M1;
  NormalShock s{};
  s.p_ratio = 1.0 + 2.0 * gamma / (gamma + 1.0) * (m2 - 1.0);
  s.rho_ratio = (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
  s.T_ratio = s.p_ratio / s.rho_ratio;
  s.M2 = std::sqrt((1.0 + 0.5 * (gamma - 1.0) * m2) / (gamma * m2 - 0.5 * (gamma - 1.0)));
  return s;
}

PrimitiveState normal_shock_state(double M1, const PrimitiveState& pre, const GasMixture& mix,
                                  double gamma) {
  const auto s = normal_shock_ratios(M1, gamma);
  const double r = mixture_r(pre, mix);
  PrimitiveState w = pre;
  w.rho = pre.rho * s.rho_ratio;
  w.p = pre.p * s.p_ratio;
  w.T = w.p / (w.rho * r);
  const double c1 = std::sqrt(gamma * r * pre.T);
  const double c2 = std::sqrt(gamma * r * w.T);
  w.vel = {s.M2 * c2 - M1 * c1, 0.0};
  complete_thermo(w, mix);
  return w;
}

InterfaceTrack track_interface_points(const Mesh& mesh, std::span<const double> Y,
                                      double threshold) {
  const int lv = mesh.max_level();
  const auto& sp = mesh.spec();
  const int nx = sp.nx << lv;
  const int ny = sp.dim == 2 ? sp.ny << lv : 1;
  const double dx = mesh.dx(lv);
  auto xc = [&](int i) { return sp.x0 + (i + 0.5) * dx; };

  InterfaceTrack tr;
  tr.downstream = sp.x1;
  tr.jet = sp.x0;
  tr.upstream = sp.x0;
  std::vector<double> row(static_cast<std::size_t>(nx));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) row[static_cast<std::size_t>(i)] = mesh.virtual_value(Y, lv, i, j);
    bool any = false;
    double left = sp.x1, right = sp.x0;
    for (int i = 0; i < nx; ++i) {
      const double f = row[static_cast<std::size_t>(i)];
      if (f < threshold) continue;
      any = true;
      double xl = xc(i), xr = xc(i);
      if (i > 0 && row[static_cast<std::size_t>(i - 1)] < threshold) {
        const double g = row[static_cast<std::size_t>(i - 1)];
        xl = xc(i - 1) + (threshold - g) / (f - g) * dx;
      }
      if (i + 1 < nx && row[static_cast<std::size_t>(i + 1)] < threshold) {
        const double g = row[static_cast<std::size_t>(i + 1)];
        xr = xc(i) + (f - threshold) / (f - g) * dx;
      }
      left = std::min(left, xl);
      right = std::max(right, xr);
    }
    if (!any) continue;
    tr.valid = true;
    tr.downstream = std::min(tr.downstream, left);
    tr.upstream = std::max(tr.upstream, right);
    if (j == 0) tr.jet = right;
  }
  return tr;
}

std::optional<double> front_position(const Mesh& mesh, std::span<const double> f, double level) {
  const int lv = mesh.max_level();
  const auto& sp = mesh.spec();
  const int nx = sp.nx << lv;
  const int j = sp.dim == 2 ? (sp.ny << lv) - 1 : 0;
  const double dx = mesh.dx(lv);
  double prev = mesh.virtual_value(f, lv, nx - 1, j);
  if (prev < level) return std::nullopt;
  for (int i = nx - 2; i >= 0; --i) {
    const double cur = mesh.virtual_value(f, lv, i, j);
    if (cur < level) {
      const double x_hi = sp.x0 + (i + 1.5) * dx;
      return x_hi - (prev - level) / (prev - cur) * dx;
    }
    prev = cur;
  }
  return std::nullopt;
}

std::vector<EntropySample> entropy_history(const std::vector<EntropySample>& series) {
  std::vector<EntropySample> out;
  if (series.empty()) return out;
  out.reserve(series.size());
  for (const auto& s : series) out.push_back({s.t, s.S - series.front().S});
  return out;
}

double linear_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw DomainError("degenerate fit: need at least two points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw DomainError("degenerate fit: abscissae are identical");
  return sxy / sxx;
}

double convergence_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("degenerate fit: need at least three points");
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b)
      if (points[a].first == points[b].first) throw DomainError("degenerate fit: repeated abscissa");
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("degenerate fit: non-positive value");
    logs.emplace_back(std::log(x), std::log(y));
  }
  return linear_slope(logs);
}

}  // namespace esdf
