#include "esdf/verify.hpp"

#include "esdf/flux.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace esdf {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

/// Random calorically perfect species; equal_r pins every molar mass.
std::vector<SpeciesData> random_species(std::mt19937_64& rng, int n, bool equal_r) {
  std::uniform_real_distribution<double> molar(0.002, 0.05), ratio(2.5, 4.5), e0(-2e5, 2e5);
  const double m_shared = molar(rng);
  std::vector<SpeciesData> sp(sz(n));
  for (int i = 0; i < n; ++i) {
    auto& s = sp[sz(i)];
    s.name = "s" + std::to_string(i);
    s.molar_mass = equal_r ? m_shared : molar(rng);
    s.e0 = e0(rng);
    s.cp_coeffs = {ratio(rng) * s.gas_constant()};
    s.t_min = 1e-6;
    s.t_max = 1e9;
  }
  return sp;
}

std::vector<double> random_fractions(std::mt19937_64& rng, int n) {
  constexpr double y_min = 0.01;
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> y(sz(n));
  double s = 0.0;
  for (auto& v : y) s += (v = ex(rng));
  for (auto& v : y) v = y_min + (1.0 - y_min * n) * v / s;
  return y;
}

PrimitiveState random_state(std::mt19937_64& rng, const GasMixture& mix, int dim) {
  std::uniform_real_distribution<double> lrho(std::log(0.05), std::log(20.0));
  std::uniform_real_distribution<double> lT(std::log(80.0), std::log(3000.0));
  std::uniform_real_distribution<double> vel(-400.0, 400.0);
  const auto Y = random_fractions(rng, mix.size());
  const double rho = std::exp(lrho(rng));
  const double T = std::exp(lT(rng));
  Vector2 v{vel(rng), dim == 2 ? vel(rng) : 0.0};
  const double p = rho * mixture_gas_constant(mix, Y) * T;
  return make_state(mix, rho, Y, v, p);
}

FaceNormal random_normal(std::mt19937_64& rng, int dim) {
  FaceNormal fn;
  if (dim == 1) {
    fn.n = {std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0, 0.0};
  } else {
    const double a = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
    fn.n = {std::cos(a), std::sin(a)};
  }
  return fn;
}

std::string describe(const PrimitiveState& w, int n, int dim) {
  std::ostringstream os;
  os.precision(17);
  os << "(rho=" << w.rho << ",T=" << w.T << ",p=" << w.p << ",v=";
  for (int k = 0; k < dim; ++k) os << (k ? "/" : "") << w.vel[sz(k)];
  os << ",Y=";
  for (int i = 0; i < n; ++i) os << (i ? "/" : "") << w.Y[sz(i)];
  os << ")";
  return os.str();
}

std::string describe_mix(const GasMixture& mix) {
  std::ostringstream os;
  os.precision(17);
  os << "species=";
  for (int i = 0; i < mix.size(); ++i) {
    const auto& s = mix.species(i);
    os << (i ? ";" : "") << "M:" << s.molar_mass << "/cp:" << s.cp_coeffs.front() << "/e0:" << s.e0;
  }
  return os.str();
}

struct Sample {
  GasMixture mix;
  Layout L;
  PrimitiveState wl, wr;
  FaceNormal fn;
};

class Property {
 public:
  Property(std::string name, double tol) { r_.name = std::move(name); r_.tolerance = tol; }

  /// Records one sample's scaled error; `ok` overrides the tolerance test
  /// for sign checks.
  void record(double err, const Sample& s, bool ok) {
    ++r_.samples;
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    r_.max_error = std::max(r_.max_error, err);
    if (ok) return;
    ++r_.failures;
    if (r_.counterexample.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "n=" << s.L.n_species << " d=" << s.L.dim << " normal=" << s.fn.n[0] << "/" << s.fn.n[1]
         << " " << describe_mix(s.mix) << " left=" << describe(s.wl, s.L.n_species, s.L.dim)
         << " right=" << describe(s.wr, s.L.n_species, s.L.dim) << " error=" << err;
      r_.counterexample = os.str();
    }
  }
  void record(double err, const Sample& s) { record(err, s, err <= r_.tolerance); }
  void record_failure(const std::string& what, const Sample& s) {
    record(std::numeric_limits<double>::infinity(), s, false);
    if (r_.failures == 1) r_.counterexample += " exception=" + what;
  }
  PropertyResult result() const { return r_; }

 private:
  PropertyResult r_;
};

double rel_norm(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

double kep_error(const Vec& f, double p_face, const Vector2& vbar, const Layout& L,
                 const FaceNormal& fn) {
  double err = 0.0;
  for (int k = 0; k < L.dim; ++k) {
    const double expect = p_face * fn.n[sz(k)] + vbar[sz(k)] * f(L.rho());
    err = std::max(err, std::abs(f(L.mom(k)) - expect) /
                            (std::abs(p_face) + std::abs(vbar[sz(k)] * f(L.rho()))));
  }
  return err;
}

Vector2 mean_velocity(const PrimitiveState& a, const PrimitiveState& b) {
  return {0.5 * (a.vel[0] + b.vel[0]), 0.5 * (a.vel[1] + b.vel[1])};
}

}  // namespace

bool VerifyReport::all_passed() const {
  if (properties.empty()) return false;
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed(); });
}

const PropertyResult& VerifyReport::find(const std::string& name) const {
  for (const auto& p : properties)
    if (p.name == name) return p;
  throw std::out_of_range("no property named '" + name + "'");
}

std::string VerifyReport::text() const {
  std::ostringstream os;
  long failed = 0;
  for (const auto& p : properties) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", p.max_error);
    os << "kind=property name=" << p.name << " status=" << (p.passed() ? "pass" : "fail")
       << " samples=" << p.samples << " failures=" << p.failures << " max_error=" << buf;
    std::snprintf(buf, sizeof buf, "%.1e", p.tolerance);
    os << " tolerance=" << buf << "\n";
    failed += p.passed() ? 0 : 1;
  }
  for (const auto& p : properties)
    if (!p.counterexample.empty())
      os << "kind=counterexample name=" << p.name << " " << p.counterexample << "\n";
  os << "kind=verify seed=" << seed << " count=" << count << " properties=" << properties.size()
     << " failed=" << failed << " status=" << (failed == 0 && !properties.empty() ? "pass" : "fail")
     << "\n";
  return os.str();
}

VerifyReport run_verify(const VerifyOptions& opt) {
  if (opt.count <= 0) throw std::invalid_argument("verify: count must be positive");
  std::mt19937_64 rng(opt.seed);
  const bool flip_before = dissipation_sign_flip();
  set_dissipation_sign_flip(opt.inject_sign_flip);

  Property ec_shuffle("ec_shuffle", 1e-10);
  Property es_identity("esdf_residual_identity", 1e-10);
  Property es_sign("esdf_residual_sign", 1e-10);
  Property diss_mix("dissipation_entropy_mixture", 1e-10);
  Property diss_frozen("dissipation_entropy_frozen", 1e-10);
  Property lemma1("lemma1", 1e-10);
  Property lemma2("lemma2_sign", 1e-10);
  Property lemma3("lemma3", 1e-10);
  Property lemma4("lemma4", 1e-10);
  Property kep_ec("kep_ec", 1e-12);
  Property kep_es("kep_esdf", 1e-12);
  Property spd("dissipation_spd", 1e-12);
  Property a0("a0_oracle", 1e-5);
  Property roundtrip("roundtrip", 1e-10);
  Property consistency("consistency", 1e-12);

  std::uniform_int_distribution<int> n_dist(1, kMaxSpecies), d_dist(1, 2);
  std::normal_distribution<double> gauss;
  const DissipationSpec frozen_spec{DissipationMode::hybrid, true};
  const DissipationSpec mixture_spec{DissipationMode::hybrid, false};

  for (long it = 0; it < opt.count; ++it) {
    const int n = n_dist(rng), dim = d_dist(rng);
    Sample s{GasMixture(random_species(rng, n, false)), {n, dim}, {}, {}, {}};
    s.wl = random_state(rng, s.mix, dim);
    s.wr = random_state(rng, s.mix, dim);
    s.fn = random_normal(rng, dim);
    const auto& L = s.L;

    try {
      // Entropy-conservative flux.
      const Vec fec = ec_flux(s.wl, s.wr, s.mix, L, s.fn);
      ec_shuffle.record(std::abs(entropy_residual(s.wl, s.wr, fec, s.mix, L, s.fn)) /
                            entropy_residual_scale(s.wl, s.wr, fec, s.mix, L, s.fn),
                        s);
      kep_ec.record(kep_error(fec, ec_pressure(s.wl, s.wr, s.mix), mean_velocity(s.wl, s.wr), L, s.fn),
                    s);

      // Central ES/DF flux with the star pair of the face composition.
      const auto avg = face_averages(s.wl, s.wr, L, s.fn);
      const FrozenPair fp =
          star_properties(s.mix, 0.5 * (s.wl.T + s.wr.T), std::span<const double>(avg.Y_bar.data(), sz(n)))
              .frozen();
      const Vec fc = esdf_central_flux(s.wl, s.wr, L, s.fn, fp);
      kep_es.record(kep_error(fc, avg.p_bar, avg.v_bar, L, s.fn), s);

      // Dissipation against the entropy of the model it is built on.
      const double res_c = entropy_residual(s.wl, s.wr, fc, s.mix, L, s.fn);
      const double scale_c = entropy_residual_scale(s.wl, s.wr, fc, s.mix, L, s.fn);
      {
        const Vec d = hybrid_dissipation(s.wl, s.wr, s.mix, L, s.fn, fp, mixture_spec);
        const double res_d = entropy_residual(s.wl, s.wr, Vec(fc - d), s.mix, L, s.fn);
        const double excess = (res_d - res_c) / scale_c;
        diss_mix.record(std::max(excess, 0.0), s, excess <= diss_mix.result().tolerance);
      }
      {
        const Vec d = hybrid_dissipation(s.wl, s.wr, s.mix, L, s.fn, fp, frozen_spec);
        const Vec dv = entropy_vars(s.wr, s.mix, L, &fp) - entropy_vars(s.wl, s.mix, L, &fp);
        const double prod = dv.dot(d);
        const double scale = dv.cwiseProduct(d).cwiseAbs().sum() + 1e-300;
        diss_frozen.record(std::max(-prod / scale, 0.0), s, -prod / scale <= 1e-10);
      }

      // Quadratic form of the scaled dissipation matrix.
      {
        const bool fz = std::bernoulli_distribution(0.5)(rng);
        const auto es = eigensystem(s.wl, s.wr, s.mix, L, s.fn, fp, FacePressure::p_theta, fz);
        const Mat M = dissipation_matrix(es, pressure_blend(s.wl.p, s.wr.p, es.p_bar));
        Vec x(L.nvars());
        for (int k = 0; k < L.nvars(); ++k) x(k) = gauss(rng);
        const double q = x.dot(M * x) / (M.norm() * x.squaredNorm());
        spd.record(std::max(-q, 0.0), s, q >= -spd.result().tolerance);
      }

      // Consistency: F(u, u) equals the physical flux.
      {
        const FrozenPair own = own_frozen_pair(s.wl, s.mix);
        const SideState side = make_side(s.wl, L, own);
        const Vec fphys = physical_flux(side, L, s.fn);
        const Vec fe = esdf_flux(s.wl, s.wl, s.mix, L, s.fn, own, frozen_spec);
        const Vec fe2 = ec_flux(s.wl, s.wl, s.mix, L, s.fn);
        const double scale = fphys.cwiseAbs().maxCoeff() + s.wl.p;
        consistency.record(std::max((fe - fphys).cwiseAbs().maxCoeff(),
                                    (fe2 - fphys).cwiseAbs().maxCoeff()) /
                               scale,
                           s);
      }

      // Round trips u -> w -> u and u -> v -> u.
      {
        const Vec u = conserved_from_primitive(s.wl, s.mix, L);
        const Vec u2 = conserved_from_primitive(primitive_from_conserved(u, s.mix, L, 500.0), s.mix, L);
        const Vec u3 = conserved_from_entropy(entropy_vars(s.wl, s.mix, L), s.mix, L);
        const FrozenPair own = own_frozen_pair(s.wl, s.mix);
        const Vec uf = conserved_from_primitive_frozen(s.wl, L, own);
        const Vec uf2 = conserved_from_primitive_frozen(
            primitive_from_conserved_frozen(uf, s.mix, L, own), L, own);
        const double scale = u.cwiseAbs().maxCoeff();
        roundtrip.record(std::max({(u2 - u).cwiseAbs().maxCoeff(), (u3 - u).cwiseAbs().maxCoeff(),
                                   (uf2 - uf).cwiseAbs().maxCoeff()}) /
                             scale,
                         s);
      }

      // Coincident-state reconstruction of A0.
      {
        const FrozenPair own = own_frozen_pair(s.wl, s.mix);
        const auto es = eigensystem(s.wl, s.wl, s.mix, L, s.fn, own, FacePressure::p_theta, false);
        const Mat fd = entropy_jacobian_fd(conserved_from_primitive(s.wl, s.mix, L), s.mix, L, own);
        a0.record(rel_norm(es.R * es.T * es.R.transpose(), fd), s);
      }

      // Jump of theta g_i with constant heats.
      {
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
          const double rl = s.wl.rho * s.wl.Y[sz(i)], rr = s.wr.rho * s.wr.Y[sz(i)];
          const double tl = 1.0 / s.wl.T, tr = 1.0 / s.wr.T;
          const double lhs = tr * gibbs(s.mix, i, s.wr.T, rr) - tl * gibbs(s.mix, i, s.wl.T, rl);
          const double cv = s.mix.species(i).cv_star(s.wl.T);
          const double ri = s.mix.r(i);
          const double t1 = s.mix.e0(i) * (tr - tl), t2 = cv * (std::log(tr) - std::log(tl)),
                       t3 = ri * (std::log(rr) - std::log(rl));
          const double scale = std::abs(tr * gibbs(s.mix, i, s.wr.T, rr)) +
                               std::abs(tl * gibbs(s.mix, i, s.wl.T, rl)) + std::abs(t1) +
                               std::abs(t2) + std::abs(t3);
          err = std::max(err, std::abs(lhs - (t1 + t2 + t3)) / scale);
        }
        lemma3.record(err, s);
      }
    } catch (const std::exception& e) {
      consistency.record_failure(e.what(), s);
    }

    // Frozen face composition: both sides share Ybar, equal gas constants.
    {
      Sample q{GasMixture(random_species(rng, n, true)), {n, dim}, {}, {}, {}};
      const auto Y = random_fractions(rng, n);
      q.wl = random_state(rng, q.mix, dim);
      q.wr = random_state(rng, q.mix, dim);
      q.fn = random_normal(rng, dim);
      try {
        // Central residual identity with v-bar n on equal-r states.
        const auto avg = face_averages(q.wl, q.wr, q.L, q.fn);
        const std::span<const double> yb(avg.Y_bar.data(), sz(n));
        const FrozenPair fp = star_properties(q.mix, q.wl.T, yb).frozen();
        const Vec fc = esdf_central_flux(q.wl, q.wr, q.L, q.fn, fp);
        const double res = entropy_residual(q.wl, q.wr, fc, q.mix, q.L, q.fn);
        double rhs = 0.0, rhs_scale = 0.0;
        for (int i = 0; i < n; ++i) {
          const double term = q.mix.r(i) * yb[sz(i)] *
                              (std::log(q.wr.Y[sz(i)]) - std::log(q.wl.Y[sz(i)])) * avg.rho_ln *
                              avg.vn_bar;
          rhs += term;
          rhs_scale += std::abs(term);
        }
        const double scale = entropy_residual_scale(q.wl, q.wr, fc, q.mix, q.L, q.fn) + rhs_scale;
        es_identity.record(std::abs(res - rhs) / scale, q);
        es_sign.record(std::max(res / scale, 0.0), q, res / scale <= es_sign.result().tolerance);

        // Sign of the composition-jump sum on the same pair, at the face composition.
        double l2 = 0.0, l2s = 0.0;
        for (int i = 0; i < n; ++i) {
          const double term = q.mix.r(i) * yb[sz(i)] *
                              (std::log(q.wr.Y[sz(i)]) - std::log(q.wl.Y[sz(i)])) * avg.rho_ln;
          l2 += term;
          l2s += std::abs(term);
        }
        const double l2n = l2s > 0.0 ? l2 / l2s : 0.0;
        lemma2.record(std::max(l2n, 0.0), q, l2n <= lemma2.result().tolerance);

        // Jump of r rho and the star-energy relation at a shared composition.
        PrimitiveState a = q.wl, b = q.wr;
        for (int i = 0; i < n; ++i) a.Y[sz(i)] = b.Y[sz(i)] = Y[sz(i)];
        const double r = mixture_gas_constant(q.mix, Y);
        a.p = a.rho * r * a.T;
        b.p = b.rho * r * b.T;
        const double ra = mixture_r(a, q.mix), rb = mixture_r(b, q.mix);
        const double lhs1 = rb * b.rho - ra * a.rho, rhs1 = r * (b.rho - a.rho);
        lemma1.record(std::abs(lhs1 - rhs1) / (std::abs(rb * b.rho) + std::abs(ra * a.rho)), q);

        const auto star = star_properties(q.mix, a.T, Y);
        const double rho_ln = log_mean(a.rho, b.rho);
        const double theta_ln = log_mean(1.0 / a.T, 1.0 / b.T);
        const double beta_ln = log_mean(a.rho / a.p, b.rho / b.p);
        double lhs4 = 0.0, scale4 = 0.0;
        for (int i = 0; i < n; ++i) {
          const double term =
              (q.mix.e0(i) + q.mix.species(i).cv_star(a.T) / theta_ln) * Y[sz(i)] * rho_ln;
          lhs4 += term;
          scale4 += std::abs(term);
        }
        const double rhs4 = (star.e0_star + 1.0 / ((star.gamma_star - 1.0) * beta_ln)) * rho_ln;
        lemma4.record(std::abs(lhs4 - rhs4) / (scale4 + std::abs(rhs4)), q);
      } catch (const std::exception& e) {
        es_identity.record_failure(e.what(), q);
      }
    }
  }
  set_dissipation_sign_flip(flip_before);

  VerifyReport rep;
  rep.seed = opt.seed;
  rep.count = opt.count;
  for (const auto* p : {&ec_shuffle, &es_identity, &es_sign, &diss_mix, &diss_frozen, &lemma1,
                        &lemma2, &lemma3, &lemma4, &kep_ec, &kep_es, &spd, &a0, &roundtrip,
                        &consistency})
    rep.properties.push_back(p->result());
  return rep;
}

}  // namespace esdf
