#include "esdf/flux.hpp"

#include <cmath>

namespace esdf {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

}  // namespace

Mat small_inverse(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  double m[kMaxVars][2 * kMaxVars];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m[i][j] = a(i, j);
      m[i][n + j] = i == j ? 1.0 : 0.0;
    }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    if (!(std::abs(m[piv][c]) > 0.0)) throw UnstableStateError("small_inverse: singular matrix");
    if (piv != c)
      for (int j = 0; j < 2 * n; ++j) std::swap(m[c][j], m[piv][j]);
    const double inv = 1.0 / m[c][c];
    for (int j = c; j < 2 * n; ++j) m[c][j] *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == c || m[i][c] == 0.0) continue;
      const double f = m[i][c];
      for (int j = c; j < 2 * n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = m[i][n + j];
  return out;
}

int eigen_group(const Layout& L, int k) {
  if (k == L.n_species - 1) return 1;
  if (k == L.nvars() - 1) return 2;
  return 0;
}

Eigensystem eigensystem(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix,
                        const Layout& L, const FaceNormal& fn, const FrozenPair& fp,
                        FacePressure fpr, bool frozen_eos, bool with_scaling) {
  const int n = L.n_species;
  const int d = L.dim;
  const int nv = L.nvars();
  const auto a = face_averages(wl, wr, L, fn, fpr);

  // Face state for the symmetrizer: log-mean partial densities, so that
  // sum_k Y_k [[r_k ln rho_k]] vanishes across a contact.
  PrimitiveState wf;
  SpeciesArray rho_k{};
  double rho_f = 0.0, rr = 0.0;
  for (int i = 0; i < n; ++i) {
    rho_k[sz(i)] = log_mean(floored_partial_density(wl.rho, wl.Y[sz(i)]),
                            floored_partial_density(wr.rho, wr.Y[sz(i)]));
    rho_f += rho_k[sz(i)];
    rr += mix.r(i) * rho_k[sz(i)];
  }
  wf.rho = rho_f;
  for (int i = 0; i < n; ++i) wf.Y[sz(i)] = rho_k[sz(i)] / rho_f;
  wf.vel = a.v_bar;
  wf.p = a.p_bar;
  wf.T = a.p_bar / rr;
  double cv_mix = 0.0;
  for (int i = 0; i < n; ++i) {
    wf.cv[sz(i)] = 0.5 * (wl.cv[sz(i)] + wr.cv[sz(i)]);
    cv_mix += wf.Y[sz(i)] * wf.cv[sz(i)];
  }
  const double r_mix = mixture_r(wf, mix);
  wf.gamma = fp.gamma_star;

  Eigensystem es;
  es.p_bar = a.p_bar;
  es.c_bar = std::sqrt(fp.gamma_star * a.p_bar / a.rho_ln);
  if (!std::isfinite(es.c_bar) || !(es.c_bar > 0.0))
    throw UnstableStateError("eigensystem: invalid face sound speed");
  const double c = es.c_bar;
  const double vn = a.vn_bar;
  // Thermal enthalpy p/rho + r/((gamma*-1) theta), each factor averaged so
  // that a pressure-velocity contact has no acoustic component.
  const double theta_ln = log_mean(1.0 / wl.T, 1.0 / wr.T);
  const double h = fp.e0_star + a.p_bar / rho_f + r_mix / ((fp.gamma_star - 1.0) * theta_ln) +
                   0.5 * a.v2_avg;

  es.R = Mat::Zero(nv, nv);
  es.lambda = Vec(nv);
  int col = 0;
  // Species columns.
  for (int k = 0; k < n - 1; ++k, ++col) {
    es.R(k, col) = 1.0;
    const double z = frozen_eos ? 0.0 : (mix.e0(k) - mix.e0(n - 1)) + (wf.cv[sz(k)] - wf.cv[sz(n - 1)]) * wf.T -
                     (mix.r(k) - mix.r(n - 1)) * wf.T * cv_mix / r_mix;
    es.R(L.energy(), col) = z;
    es.lambda(col) = vn;
  }
  auto fill_mass = [&](int c_idx) {
    for (int i = 0; i < n - 1; ++i) es.R(i, c_idx) = wf.Y[sz(i)];
    es.R(L.rho(), c_idx) = 1.0;
  };
  // Acoustic (-).
  fill_mass(col);
  for (int k = 0; k < d; ++k) es.R(L.mom(k), col) = a.v_bar[sz(k)] - c * fn.n[sz(k)];
  es.R(L.energy(), col) = h - c * vn;
  es.lambda(col) = vn - c;
  ++col;
  // Entropy.
  fill_mass(col);
  for (int k = 0; k < d; ++k) es.R(L.mom(k), col) = a.v_bar[sz(k)];
  es.R(L.energy(), col) = 0.5 * a.v2_avg + fp.e0_star;
  es.lambda(col) = vn;
  ++col;
  // Shear.
  if (d == 2) {
    const double tx = -fn.n[1], ty = fn.n[0];
    es.R(L.mom(0), col) = tx;
    es.R(L.mom(1), col) = ty;
    es.R(L.energy(), col) = a.v_bar[0] * tx + a.v_bar[1] * ty;
    es.lambda(col) = vn;
    ++col;
  }
  // Acoustic (+).
  fill_mass(col);
  for (int k = 0; k < d; ++k) es.R(L.mom(k), col) = a.v_bar[sz(k)] + c * fn.n[sz(k)];
  es.R(L.energy(), col) = h + c * vn;
  es.lambda(col) = vn + c;

  es.lambda_max = std::abs(vn) + c;
  es.A0 = entropy_jacobian(wf, mix, L, frozen_eos ? &fp : nullptr);
  es.face = wf;
  if (!with_scaling) return es;

  const Mat Ri = small_inverse(es.R);
  es.T_full = Ri.lazyProduct(es.A0.lazyProduct(Ri.transpose()));
  es.T_full = 0.5 * (es.T_full + es.T_full.transpose());
  if (!es.T_full.allFinite()) throw UnstableStateError("eigensystem: singular eigenvector matrix");
  es.T = es.T_full;
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j)
      if (eigen_group(L, i) != eigen_group(L, j)) es.T(i, j) = 0.0;
  return es;
}

}  // namespace esdf
