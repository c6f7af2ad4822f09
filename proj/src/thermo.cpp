#include "esdf/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace esdf {

double SpeciesData::cp(double T) const {
  double acc = 0.0;
  for (auto it = cp_coeffs.rbegin(); it != cp_coeffs.rend(); ++it) acc = acc * T + *it;
  return acc;
}

double SpeciesData::cp_integral(double T) const {
  double acc = 0.0;
  for (std::size_t k = cp_coeffs.size(); k-- > 0;)
    acc = acc * T + cp_coeffs[k] / static_cast<double>(k + 1);
  return acc * T;
}

double SpeciesData::cp_star(double T) const {
  double acc = 0.0;
  for (std::size_t k = cp_coeffs.size(); k-- > 0;)
    acc = acc * T + cp_coeffs[k] / static_cast<double>(k + 1);
  return acc;
}

GasMixture::GasMixture(std::vector<SpeciesData> species) : species_(std::move(species)) {
  if (species_.empty()) throw std::invalid_argument("GasMixture: at least one species required");
  if (species_.size() > static_cast<std::size_t>(kMaxSpecies))
    throw std::invalid_argument("GasMixture: too many species (max " +
                                std::to_string(kMaxSpecies) + ")");
  std::set<std::string> names;
  t_min_ = 0.0;
  t_max_ = std::numeric_limits<double>::infinity();
  for (const auto& s : species_) {
    if (!names.insert(s.name).second)
      throw std::invalid_argument("GasMixture: duplicate species '" + s.name + "'");
    if (!(s.molar_mass > 0.0))
      throw std::invalid_argument("GasMixture: species '" + s.name + "' needs molar mass > 0");
    if (s.cp_coeffs.empty())
      throw std::invalid_argument("GasMixture: species '" + s.name + "' has no cp coefficients");
    t_min_ = std::max(t_min_, s.t_min);
    t_max_ = std::min(t_max_, s.t_max);
    calorically_perfect_ = calorically_perfect_ && s.calorically_perfect();
    r_.push_back(s.gas_constant());
    // cp > r on a coarse sample of the validity range keeps gamma > 1.
    for (int k = 0; k <= 16; ++k) {
      const double T = s.t_min + (s.t_max - s.t_min) * k / 16.0;
      if (!(s.cp(T) > s.gas_constant()) || !(s.cp_star(T) > s.gas_constant()))
        throw std::invalid_argument("GasMixture: species '" + s.name + "' has cp <= r at T=" +
                                    std::to_string(T));
    }
  }
  if (!(t_min_ < t_max_)) throw std::invalid_argument("GasMixture: empty temperature range");
}

int GasMixture::index_of(std::string_view name) const {
  for (int i = 0; i < size(); ++i)
    if (species(i).name == name) return i;
  return -1;
}

GasMixture GasMixture::from_names(std::span<const std::string> names) {
  std::vector<SpeciesData> picked;
  for (const auto& n : names) {
    const auto& table = builtin_species();
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& s) { return s.name == n; });
    if (it == table.end()) throw std::invalid_argument("unknown species '" + n + "'");
    picked.push_back(*it);
  }
  return GasMixture(std::move(picked));
}

GasMixture GasMixture::from_names(std::initializer_list<std::string_view> names) {
  std::vector<std::string> v(names.begin(), names.end());
  return from_names(std::span<const std::string>(v));
}

void check_composition(std::span<const double> Y) {
  double sum = 0.0;
  for (double y : Y) {
    if (!(y >= -1e-12)) throw CompositionError("negative mass fraction " + std::to_string(y));
    sum += y;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw CompositionError("mass fractions sum to " + std::to_string(sum));
}

double mixture_gas_constant(const GasMixture& mix, std::span<const double> Y) {
  check_composition(Y);
  double r = 0.0;
  for (int i = 0; i < mix.size(); ++i) r += Y[static_cast<std::size_t>(i)] * mix.r(i);
  return r;
}

MixtureHeats mixture_heats(const GasMixture& mix, std::span<const double> Y, double T) {
  if (!(T >= mix.t_min() && T <= mix.t_max()))
    throw DomainError("temperature " + std::to_string(T) + " K outside validity range");
  const double r = mixture_gas_constant(mix, Y);
  double cp = 0.0;
  for (int i = 0; i < mix.size(); ++i) cp += Y[static_cast<std::size_t>(i)] * mix.species(i).cp(T);
  return {cp, cp - r};
}

double energy_from_temperature(const GasMixture& mix, std::span<const double> rho_i, double T) {
  double rho_e = 0.0;
  for (int i = 0; i < mix.size(); ++i)
    rho_e += rho_i[static_cast<std::size_t>(i)] * mix.species(i).internal_energy(T);
  return rho_e;
}

namespace {

double heat_capacity_density(const GasMixture& mix, std::span<const double> rho_i, double T) {
  double c = 0.0;
  for (int i = 0; i < mix.size(); ++i) c += rho_i[static_cast<std::size_t>(i)] * mix.species(i).cv(T);
  return c;
}

}  // namespace

double temperature_from_energy(const GasMixture& mix, double rho_e, std::span<const double> rho_i,
                               double t_guess) {
  const double rho = std::accumulate(rho_i.begin(), rho_i.begin() + mix.size(), 0.0);
  if (!(rho > 0.0)) throw ThermoError("temperature_from_energy: non-positive density");

  if (mix.calorically_perfect()) {
    double base = 0.0;
    double cv = 0.0;
    for (int i = 0; i < mix.size(); ++i) {
      base += rho_i[static_cast<std::size_t>(i)] * mix.e0(i);
      cv += rho_i[static_cast<std::size_t>(i)] * mix.species(i).cv(0.0);
    }
    const double T = (rho_e - base) / cv;
    if (!(T > 0.0) || !std::isfinite(T))
      throw ThermoError("temperature_from_energy: T = " + std::to_string(T));
    return T;
  }

  const double lo0 = mix.t_min();
  const double hi0 = mix.t_max();
  auto residual = [&](double T) { return energy_from_temperature(mix, rho_i, T) - rho_e; };
  const double tol = 1e-10 * std::max(std::abs(rho_e), 1e-300);

  double T = std::clamp(t_guess, lo0, hi0);
  for (int it = 0; it < 50; ++it) {
    const double f = residual(T);
    if (std::abs(f) <= tol) return T;
    const double df = heat_capacity_density(mix, rho_i, T);
    const double next = T - f / df;
    if (!(next > lo0 && next < hi0)) break;
    if (std::abs(next - T) <= 1e-14 * T) return next;
    T = next;
  }

  // Bisection on the validity range; e(T) is monotone because cv > 0.
  double lo = lo0, hi = hi0;
  double flo = residual(lo), fhi = residual(hi);
  if (flo > 0.0 || fhi < 0.0)
    throw ThermoError("temperature_from_energy: no root in [" + std::to_string(lo0) + ", " +
                      std::to_string(hi0) + "] K");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double pressure_eos(const GasMixture& mix, double rho, double T, std::span<const double> Y) {
  return mixture_gas_constant(mix, Y) * rho * T;
}

double mixture_entropy(const GasMixture& mix, double rho, double T, std::span<const double> Y) {
  const double lnT = std::log(T);
  double s = 0.0;
  for (int i = 0; i < mix.size(); ++i) {
    const double y = Y[static_cast<std::size_t>(i)];
    if (y == 0.0) continue;
    s += y * (mix.species(i).cv_star(T) * lnT - mix.r(i) * floored_log_density(rho, y));
  }
  return s;
}

double gibbs(const GasMixture& mix, int i, double T, double rho_i) {
  const auto& sp = mix.species(i);
  const double cv = sp.cv_star(T);
  const double s = cv * std::log(T) - mix.r(i) * std::log(std::max(rho_i, kDensityFloor));
  return sp.e0 + cv * T + mix.r(i) * T - T * s;
}

StarProperties star_properties(const GasMixture& mix, double T, std::span<const double> Y) {
  if (!(T > 0.0)) throw ThermoError("star_properties: T must be positive");
  double cp = 0.0, e0 = 0.0, r = 0.0;
  for (int i = 0; i < mix.size(); ++i) {
    const double y = Y[static_cast<std::size_t>(i)];
    cp += y * mix.species(i).cp_star(T);
    e0 += y * mix.e0(i);
    r += y * mix.r(i);
  }
  if (!(cp > r)) throw ThermoError("star_properties: cp* <= r");
  return {cp, cp / (cp - r), e0, cp - r};
}

double caloric_pressure(double rho, double rho_e, const FrozenPair& fp, double p_floor,
                        bool* floored) {
  double p = (fp.gamma_star - 1.0) * (rho_e - rho * fp.e0_star);
  if (floored) *floored = false;
  if (p_floor > 0.0 && !(p > p_floor)) {
    p = p_floor;
    if (floored) *floored = true;
  }
  return p;
}

}  // namespace esdf
