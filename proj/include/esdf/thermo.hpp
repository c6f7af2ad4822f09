#pragma once

// Species data, mixture thermodynamics and the Double-Flux "star" properties.
//
// All energies use the reference temperature T0 = 0 K, so the species
// internal energy is e_i(T) = e0_i + int_0^T cv_i dT'.

#include "esdf/types.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esdf {

inline constexpr double kUniversalGasConstant = 8.314462618;  // J/(mol K)
inline constexpr double kMassFractionFloor = 1e-11;
inline constexpr double kDensityFloor = 1e-12;  // kg/m^3

struct SpeciesData {
  std::string name;
  double molar_mass = 0.0;         // kg/mol
  double e0 = 0.0;                 // J/kg at T0 = 0
  std::vector<double> cp_coeffs;   // cp(T) = sum_k c_k T^k, J/(kg K)
  double t_min = 1.0;
  double t_max = 1e4;

  double gas_constant() const { return kUniversalGasConstant / molar_mass; }
  double cp(double T) const;
  /// int_0^T cp dT'
  double cp_integral(double T) const;
  double cv(double T) const { return cp(T) - gas_constant(); }
  /// cp* = (int_0^T cp dT') / T, the equivalent calorically perfect heat.
  double cp_star(double T) const;
  double cv_star(double T) const { return cp_star(T) - gas_constant(); }
  double internal_energy(double T) const { return e0 + cp_integral(T) - gas_constant() * T; }
  bool calorically_perfect() const { return cp_coeffs.size() <= 1; }
};

struct StarProperties {
  double cp_star = 0.0;
  double gamma_star = 0.0;
  double e0_star = 0.0;
  double cv_star = 0.0;

  FrozenPair frozen() const { return {gamma_star, e0_star}; }
};

/// Immutable after construction; safe to share across threads.
class GasMixture {
 public:
  explicit GasMixture(std::vector<SpeciesData> species);

  /// Builds a mixture from the built-in species table ("H2", "N2", "O2",
  /// "He", "ideal").
  static GasMixture from_names(std::span<const std::string> names);
  static GasMixture from_names(std::initializer_list<std::string_view> names);

  int size() const { return static_cast<int>(species_.size()); }
  const SpeciesData& species(int i) const { return species_[static_cast<std::size_t>(i)]; }
  int index_of(std::string_view name) const;
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  bool calorically_perfect() const { return calorically_perfect_; }
  double r(int i) const { return r_[static_cast<std::size_t>(i)]; }
  double e0(int i) const { return species_[static_cast<std::size_t>(i)].e0; }

 private:
  std::vector<SpeciesData> species_;
  std::vector<double> r_;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
  bool calorically_perfect_ = true;
};

/// Species table text format: one record per line,
///   name molar_mass e0 t_min t_max cp_0 [cp_1 ...]
/// '#' starts a comment.
std::vector<SpeciesData> parse_species_table(std::istream& in);
std::vector<SpeciesData> load_species_table(const std::string& path);
const std::vector<SpeciesData>& builtin_species();

// --- mixture operations -------------------------------------------------

/// Throws CompositionError unless Y_i >= -1e-12 and |sum Y - 1| <= 1e-10.
void check_composition(std::span<const double> Y);

double mixture_gas_constant(const GasMixture& mix, std::span<const double> Y);

struct MixtureHeats {
  double cp;
  double cv;
};
MixtureHeats mixture_heats(const GasMixture& mix, std::span<const double> Y, double T);

/// rho e = sum rho_i e_i(T) for partial densities rho_i (all n species).
double energy_from_temperature(const GasMixture& mix, std::span<const double> rho_i, double T);

/// Inverts rho e = sum rho_i e_i(T). Closed form for calorically perfect
/// mixtures, otherwise Newton from `t_guess` with bisection fallback.
double temperature_from_energy(const GasMixture& mix, double rho_e,
                               std::span<const double> rho_i, double t_guess = 300.0);

double pressure_eos(const GasMixture& mix, double rho, double T, std::span<const double> Y);

/// Mixture entropy with star heats, s = sum Y_i (cv*_i ln T - r_i ln(rho Y_i)).
double mixture_entropy(const GasMixture& mix, double rho, double T, std::span<const double> Y);

/// Gibbs function g_i = e_i + r_i T - T s_i of species i (star heats).
double gibbs(const GasMixture& mix, int i, double T, double rho_i);

StarProperties star_properties(const GasMixture& mix, double T, std::span<const double> Y);

/// p = (gamma* - 1)(rho e - rho e0*). When the result falls below
/// `p_floor` it is clamped and `*floored` is set.
double caloric_pressure(double rho, double rho_e, const FrozenPair& fp, double p_floor = 0.0,
                        bool* floored = nullptr);

/// Inverse of caloric_pressure: internal energy density for given p.
inline double caloric_internal_energy(double rho, double p, const FrozenPair& fp) {
  return rho * fp.e0_star + p / (fp.gamma_star - 1.0);
}

inline double floored_partial_density(double rho, double Y) {
  const double y = Y > kMassFractionFloor ? Y : kMassFractionFloor;
  const double rho_i = rho * y;
  return rho_i > kDensityFloor ? rho_i : kDensityFloor;
}

inline double floored_log_density(double rho, double Y) {
  return std::log(floored_partial_density(rho, Y));
}

}  // namespace esdf
