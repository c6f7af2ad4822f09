#include "esdf/thermo.hpp"

#include <doctest.h>

#include <sstream>

using namespace esdf;
using doctest::Approx;

TEST_CASE("species table parses records and rejects malformed lines") {
  std::istringstream ok("# comment\nA 0.028 1e5 10 3000 1000 0.1  # trailing\n\nB 0.004 0 1 1e5 5193\n");
  const auto t = parse_species_table(ok);
  REQUIRE(t.size() == 2);
  CHECK(t[0].name == "A");
  CHECK(t[0].e0 == 1e5);
  CHECK(t[0].cp_coeffs.size() == 2);
  CHECK(t[1].calorically_perfect());

  std::istringstream missing("A 0.028 0 10\n");
  CHECK_THROWS_AS(parse_species_table(missing), ConfigError);
  std::istringstream no_cp("A 0.028 0 10 3000\n");
  CHECK_THROWS_AS(parse_species_table(no_cp), ConfigError);
  std::istringstream bad_num("A 0.028 0 10 3000 1000 x\n");
  CHECK_THROWS_AS(parse_species_table(bad_num), ConfigError);
}

TEST_CASE("data/species.dat matches the built-in table") {
  const auto file = load_species_table(std::string(ESDF_DATA_DIR) + "/species.dat");
  const auto& builtin = builtin_species();
  REQUIRE(file.size() == builtin.size());
  for (std::size_t k = 0; k < file.size(); ++k) {
    CHECK(file[k].name == builtin[k].name);
    CHECK(file[k].molar_mass == builtin[k].molar_mass);
    CHECK(file[k].cp_coeffs == builtin[k].cp_coeffs);
  }
  CHECK_THROWS_AS(load_species_table("/nonexistent/species.dat"), ConfigError);
}

TEST_CASE("mixture construction validates species") {
  CHECK_THROWS(GasMixture(std::vector<SpeciesData>{}));
  CHECK_THROWS(GasMixture::from_names({"N2", "N2"}));
  CHECK_THROWS(GasMixture::from_names({"Xe"}));
  CHECK_THROWS(GasMixture::from_names({"H2", "N2", "O2", "He", "ideal"}));
  const auto mix = GasMixture::from_names({"N2", "He"});
  CHECK(mix.size() == 2);
  CHECK(mix.index_of("He") == 1);
  CHECK(mix.r(1) == Approx(kUniversalGasConstant / 0.0040026));
}

TEST_CASE("composition checks") {
  const std::vector<double> good{0.3, 0.7};
  CHECK_NOTHROW(check_composition(good));
  const std::vector<double> neg{-0.1, 1.1};
  CHECK_THROWS_AS(check_composition(neg), CompositionError);
  const std::vector<double> sum{0.3, 0.6};
  CHECK_THROWS_AS(check_composition(sum), CompositionError);
}

TEST_CASE("star properties of a calorically perfect gas equal its constants") {
  const auto mix = GasMixture::from_names({"ideal"});
  const std::vector<double> Y{1.0};
  const auto s = star_properties(mix, 2.7, Y);
  CHECK(s.gamma_star == Approx(1.4).epsilon(1e-14));
  CHECK(s.e0_star == 0.0);
  CHECK(s.cv_star == Approx(2.5).epsilon(1e-14));
}

TEST_CASE("star heats integrate the linear cp fit") {
  const auto mix = GasMixture::from_names({"N2"});
  const auto& n2 = mix.species(0);
  const double T = 800.0;
  // cp* = (c0 T + c1 T^2 / 2) / T
  CHECK(n2.cp_star(T) == Approx(987.0 + 0.09 * T).epsilon(1e-14));
  const std::vector<double> Y{1.0};
  const auto s = star_properties(mix, T, Y);
  CHECK(s.gamma_star == Approx(n2.cp_star(T) / (n2.cp_star(T) - mix.r(0))).epsilon(1e-14));
}

TEST_CASE("temperature inversion round trips, closed form and Newton") {
  for (auto names : {std::vector<std::string>{"He"}, std::vector<std::string>{"N2", "O2", "H2"}}) {
    const auto mix = GasMixture::from_names(std::span<const std::string>(names));
    std::vector<double> rho_i(static_cast<std::size_t>(mix.size()), 0.4);
    for (double T : {120.0, 300.0, 1700.0}) {
      const double re = energy_from_temperature(mix, rho_i, T);
      CHECK(temperature_from_energy(mix, re, rho_i, 900.0) == Approx(T).epsilon(1e-12));
    }
  }
}

TEST_CASE("temperature inversion reports failure") {
  const auto mix = GasMixture::from_names({"N2"});
  const std::vector<double> zero{0.0};
  CHECK_THROWS_AS(temperature_from_energy(mix, 1e5, zero), ThermoError);
  const std::vector<double> rho{1.0};
  CHECK_THROWS_AS(temperature_from_energy(mix, -1e9, rho), ThermoError);
}

TEST_CASE("caloric pressure inverts the caloric energy and floors") {
  const FrozenPair fp{1.3, 2e4};
  const double rho = 1.7, p = 2.2e5;
  const double re = caloric_internal_energy(rho, p, fp);
  CHECK(caloric_pressure(rho, re, fp) == Approx(p).epsilon(1e-14));
  bool floored = false;
  CHECK(caloric_pressure(rho, 0.0, fp, 10.0, &floored) == 10.0);
  CHECK(floored);
}

TEST_CASE("Gibbs function is consistent with the mixture entropy") {
  const auto mix = GasMixture::from_names({"N2", "He"});
  const std::vector<double> Y{0.6, 0.4};
  const double rho = 1.1, T = 450.0;
  // rho s = sum rho_i s_i and g_i = e_i + r_i T - T s_i
  double rs = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto& sp = mix.species(i);
    const double rho_i = rho * Y[static_cast<std::size_t>(i)];
    const double e_i = sp.e0 + sp.cv_star(T) * T;
    const double s_i = (e_i + mix.r(i) * T - gibbs(mix, i, T, rho_i)) / T;
    rs += rho_i * s_i;
  }
  CHECK(rs / rho == Approx(mixture_entropy(mix, rho, T, Y)).epsilon(1e-12));
}

TEST_CASE("floored partial densities") {
  CHECK(floored_partial_density(2.0, 0.0) == Approx(2e-11));
  CHECK(floored_partial_density(1e-3, 1e-12) == kDensityFloor);
  CHECK(floored_partial_density(2.0, 0.5) == 1.0);
}
