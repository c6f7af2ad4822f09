#include "esdf/flux.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace esdf {

namespace {

thread_local std::uint64_t g_log_mean_calls = 0;
thread_local bool g_flip_dissipation = false;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

double dot_n(const Vector2& v, const FaceNormal& fn, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += v[sz(k)] * fn.n[sz(k)];
  return s;
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "lf") return Scheme::lf;
  if (name == "ec") return Scheme::ec;
  if (name == "esdf-central") return Scheme::esdf_central;
  if (name == "esdf") return Scheme::esdf;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected lf|ec|esdf-central|esdf)");
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::lf: return "lf";
    case Scheme::ec: return "ec";
    case Scheme::esdf_central: return "esdf-central";
    case Scheme::esdf: return "esdf";
  }
  return "?";
}

void set_dissipation_sign_flip(bool on) { g_flip_dissipation = on; }
bool dissipation_sign_flip() { return g_flip_dissipation; }

std::uint64_t log_mean_calls() { return g_log_mean_calls; }
void reset_log_mean_calls() { g_log_mean_calls = 0; }

double log_mean(double a_l, double a_r) {
  ++g_log_mean_calls;
  if (!(a_l > 0.0) || !(a_r > 0.0)) throw DomainError("log_mean: arguments must be positive");
  // ln(a_l/a_r) = 2 atanh(f); the series covers f -> 0.
  const double f = (a_l - a_r) / (a_l + a_r);
  const double u = f * f;
  double F;
  if (u < 1e-4)
    F = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0;
  else if (u < 0.25)
    F = std::atanh(f) / f;
  else
    F = std::log(a_l / a_r) / (2.0 * f);
  return (a_l + a_r) / (2.0 * F);
}

SideState make_side(const PrimitiveState& w, const Layout& L, const FrozenPair& fp) {
  return {w, conserved_from_primitive_frozen(w, L, fp)};
}

Vec physical_flux(const SideState& s, const Layout& L, const FaceNormal& fn) {
  const auto& w = s.w;
  const double vn = w.normal_velocity(fn.n, L.dim);
  Vec f(L.nvars());
  for (int i = 0; i < L.n_species - 1; ++i) f(i) = s.u(i) * vn;
  f(L.rho()) = w.rho * vn;
  for (int k = 0; k < L.dim; ++k) f(L.mom(k)) = w.rho * vn * w.vel[sz(k)] + w.p * fn.n[sz(k)];
  f(L.energy()) = (s.u(L.energy()) + w.p) * vn;
  return f;
}

double ec_pressure(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix) {
  double num = 0.0;
  for (int i = 0; i < mix.size(); ++i)
    num += mix.r(i) * 0.5 * (wl.rho * wl.Y[sz(i)] + wr.rho * wr.Y[sz(i)]);
  const double theta_bar = 0.5 * (1.0 / wl.T + 1.0 / wr.T);
  return num / theta_bar;
}

Vec ec_flux(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix,
            const Layout& L, const FaceNormal& fn) {
  const int n = L.n_species;
  Vector2 vbar{};
  double vbar2 = 0.0;
  for (int k = 0; k < L.dim; ++k) {
    vbar[sz(k)] = 0.5 * (wl.vel[sz(k)] + wr.vel[sz(k)]);
    vbar2 += vbar[sz(k)] * vbar[sz(k)];
  }
  const double vn = dot_n(vbar, fn, L.dim);
  const double kin = vbar2 - 0.25 * (wl.speed2(L.dim) + wr.speed2(L.dim));
  const double theta_ln = log_mean(1.0 / wl.T, 1.0 / wr.T);
  const double p_ec = ec_pressure(wl, wr, mix);

  Vec f(L.nvars());
  double f1 = 0.0, f3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rho_ln = log_mean(floored_partial_density(wl.rho, wl.Y[sz(i)]),
                                   floored_partial_density(wr.rho, wr.Y[sz(i)]));
    const double f1i = rho_ln * vn;
    if (i < n - 1) f(i) = f1i;
    f1 += f1i;
    const double cv = 0.5 * (wl.cv[sz(i)] + wr.cv[sz(i)]);
    f3 += (mix.e0(i) + cv / theta_ln) * f1i;
  }
  f(L.rho()) = f1;
  for (int k = 0; k < L.dim; ++k) f(L.mom(k)) = vbar[sz(k)] * f1 + p_ec * fn.n[sz(k)];
  f(L.energy()) = f3 + kin * f1 + p_ec * vn;
  return f;
}

FaceAverages face_averages(const PrimitiveState& wl, const PrimitiveState& wr, const Layout& L,
                           const FaceNormal& fn, FacePressure fpr) {
  FaceAverages a{};
  a.rho_ln = log_mean(wl.rho, wr.rho);
  const double beta_l = wl.rho / wl.p, beta_r = wr.rho / wr.p;
  a.beta_ln = log_mean(beta_l, beta_r);
  if (fpr == FacePressure::p_theta) {
    const double th_l = 1.0 / wl.T, th_r = 1.0 / wr.T;
    a.p_bar = (wl.p * th_l + wr.p * th_r) / (th_l + th_r);
  } else {
    a.p_bar = (wl.rho + wr.rho) / (beta_l + beta_r);
  }
  for (int k = 0; k < L.dim; ++k) a.v_bar[sz(k)] = 0.5 * (wl.vel[sz(k)] + wr.vel[sz(k)]);
  a.vn_bar = dot_n(a.v_bar, fn, L.dim);
  a.v2_avg = 0.5 * (wl.speed2(L.dim) + wr.speed2(L.dim));
  double sum = 0.0;
  for (int i = 0; i < L.n_species; ++i) {
    a.Y_bar[sz(i)] = 0.5 * (wl.Y[sz(i)] + wr.Y[sz(i)]);
    sum += a.Y_bar[sz(i)];
  }
  for (int i = 0; i < L.n_species; ++i) a.Y_bar[sz(i)] /= sum;
  return a;
}

Vec esdf_central_flux(const PrimitiveState& wl, const PrimitiveState& wr, const Layout& L,
                      const FaceNormal& fn, const FrozenPair& fp, FacePressure fpr) {
  const auto a = face_averages(wl, wr, L, fn, fpr);
  double vbar2 = 0.0;
  for (int k = 0; k < L.dim; ++k) vbar2 += a.v_bar[sz(k)] * a.v_bar[sz(k)];
  const double kin = vbar2 - 0.5 * a.v2_avg;

  Vec f(L.nvars());
  const double f1 = a.rho_ln * a.vn_bar;
  for (int i = 0; i < L.n_species - 1; ++i) f(i) = a.Y_bar[sz(i)] * f1;
  f(L.rho()) = f1;
  for (int k = 0; k < L.dim; ++k) f(L.mom(k)) = a.v_bar[sz(k)] * f1 + a.p_bar * fn.n[sz(k)];
  f(L.energy()) = (fp.e0_star + 1.0 / ((fp.gamma_star - 1.0) * a.beta_ln) + kin) * f1 +
                  a.p_bar * a.vn_bar;
  return f;
}

double pressure_blend(double p_l, double p_r, double p_bar) {
  return std::clamp(std::sqrt(std::abs(p_r - p_l) / (2.0 * p_bar)), 0.0, 1.0);
}

Mat dissipation_matrix(const Eigensystem& es, double theta) {
  const int nv = static_cast<int>(es.lambda.size());
  Vec s(nv);
  for (int k = 0; k < nv; ++k)
    s(k) = std::sqrt((1.0 - theta) * std::abs(es.lambda(k)) + theta * es.lambda_max);
  const Mat RS = es.R * s.asDiagonal();
  Mat M = RS * es.T * RS.transpose();
  return 0.5 * (M + M.transpose());
}

Vec hybrid_dissipation(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix,
                       const Layout& L, const FaceNormal& fn, const FrozenPair& fp,
                       const DissipationSpec& spec, FacePressure fpr) {
  Vec d = Vec::Zero(L.nvars());
  if (spec.mode == DissipationMode::none) return d;
  const FrozenPair* fz = spec.frozen_eos ? &fp : nullptr;
  const Vec dv = entropy_vars(wr, mix, L, fz) - entropy_vars(wl, mix, L, fz);
  if (dv.isZero(0.0)) return d;
  const auto es = eigensystem(wl, wr, mix, L, fn, fp, fpr, spec.frozen_eos, false);
  const double theta =
      spec.mode == DissipationMode::full_lf ? 1.0 : pressure_blend(wl.p, wr.p, es.p_bar);
  const int nv = L.nvars();
  Vec s(nv);
  for (int k = 0; k < nv; ++k)
    s(k) = std::sqrt((1.0 - theta) * std::abs(es.lambda(k)) + theta * es.lambda_max);

  // d = 1/2 R S T S R^T [[v]] with T the block-diagonal part of
  // R^-1 A0 R^-T, applied one eigenvalue group at a time.
  const Mat Ri = small_inverse(es.R);
  Mat T = Ri.lazyProduct(es.A0.lazyProduct(Ri.transpose()));
  for (int j = 0; j < nv; ++j) {
    const int gj = eigen_group(L, j);
    for (int i = 0; i < nv; ++i)
      if (eigen_group(L, i) != gj) T(i, j) = 0.0;
  }
  const Vec b = s.cwiseProduct(es.R.transpose().lazyProduct(dv));
  const Vec c = T.lazyProduct(b);
  if (!c.allFinite()) throw UnstableStateError("hybrid_dissipation: singular eigenvector matrix");
  d = 0.5 * es.R.lazyProduct(Vec(s.cwiseProduct(c)));
  if (g_flip_dissipation) d = -d;
  return d;
}

Vec esdf_flux(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix,
              const Layout& L, const FaceNormal& fn, const FrozenPair& fp,
              const DissipationSpec& spec, FacePressure fpr) {
  Vec f = esdf_central_flux(wl, wr, L, fn, fp, fpr);
  if (spec.mode != DissipationMode::none) f -= hybrid_dissipation(wl, wr, mix, L, fn, fp, spec, fpr);
  return f;
}

Vec lax_friedrichs_flux(const SideState& l, const SideState& r, const Layout& L,
                        const FaceNormal& fn) {
  const double lam =
      std::max(std::abs(l.w.normal_velocity(fn.n, L.dim)) + l.w.sound_speed(),
               std::abs(r.w.normal_velocity(fn.n, L.dim)) + r.w.sound_speed());
  return 0.5 * (physical_flux(l, L, fn) + physical_flux(r, L, fn)) - 0.5 * lam * (r.u - l.u);
}

double entropy_residual(const PrimitiveState& wl, const PrimitiveState& wr, const Vec& flux,
                        const GasMixture& mix, const Layout& L, const FaceNormal& fn) {
  const Vec dv = entropy_vars(wr, mix, L) - entropy_vars(wl, mix, L);
  const Vector2 psi_l = entropy_potential(wl, mix, L);
  const Vector2 psi_r = entropy_potential(wr, mix, L);
  return dv.dot(flux) - (dot_n(psi_r, fn, L.dim) - dot_n(psi_l, fn, L.dim));
}

double entropy_residual_scale(const PrimitiveState& wl, const PrimitiveState& wr, const Vec& flux,
                              const GasMixture& mix, const Layout& L, const FaceNormal& fn) {
  const Vec mag = entropy_vars(wr, mix, L).cwiseAbs() + entropy_vars(wl, mix, L).cwiseAbs();
  const Vector2 psi_l = entropy_potential(wl, mix, L);
  const Vector2 psi_r = entropy_potential(wr, mix, L);
  return mag.cwiseProduct(flux).cwiseAbs().sum() +
         std::abs(dot_n(psi_r, fn, L.dim)) + std::abs(dot_n(psi_l, fn, L.dim));
}

Vec numerical_flux(const FluxOptions& opt, const SideState& l, const SideState& r,
                   const GasMixture& mix, const Layout& L, const FaceNormal& fn,
                   const FrozenPair& fp) {
  switch (opt.scheme) {
    case Scheme::lf: return lax_friedrichs_flux(l, r, L, fn);
    case Scheme::ec: return ec_flux(l.w, r.w, mix, L, fn);
    case Scheme::esdf_central: return esdf_central_flux(l.w, r.w, L, fn, fp, opt.face_pressure);
    case Scheme::esdf:
      return esdf_flux(l.w, r.w, mix, L, fn, fp, opt.dissipation, opt.face_pressure);
  }
  return Vec::Zero(L.nvars());
}

}  // namespace esdf
