#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace esdf {

inline constexpr int kMaxSpecies = 4;
inline constexpr int kMaxDim = 2;
inline constexpr int kMaxVars = kMaxSpecies + kMaxDim + 1;

/// Small stack-allocated vectors/matrices sized for one conserved state.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxVars, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVars, kMaxVars>;

using SpeciesArray = std::array<double, kMaxSpecies>;
using Vector2 = std::array<double, kMaxDim>;

/// Index map of the conserved vector (rhoY_1..rhoY_{n-1}, rho, rho v, rho E).
struct Layout {
  int n_species = 1;
  int dim = 1;

  constexpr int nvars() const { return n_species + dim + 1; }
  constexpr int rho() const { return n_species - 1; }
  constexpr int mom(int k) const { return n_species + k; }
  constexpr int energy() const { return n_species + dim; }
  friend constexpr bool operator==(const Layout&, const Layout&) = default;
};

/// Per-cell Double-Flux auxiliaries, frozen over one timestep.
struct FrozenPair {
  double gamma_star = 1.4;
  double e0_star = 0.0;
  friend bool operator==(const FrozenPair&, const FrozenPair&) = default;
};

struct FaceNormal {
  Vector2 n{1.0, 0.0};
  double area = 1.0;
};

class ThermoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnstableStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esdf
