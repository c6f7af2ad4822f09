#include "esdf/thermo.hpp"

#include <fstream>
#include <sstream>

namespace esdf {

namespace {

// Linear cp(T) fits through tabulated values at 300 K and 1000 K; He is
// monatomic. "ideal" is the nondimensional gas r = 1, gamma = 1.4.
constexpr const char* kBuiltinTable = R"(# name  molar_mass[kg/mol]  e0[J/kg]  t_min  t_max  cp coefficients
H2     0.002016     0.0  50.0  3000.0  14017.285714285714  0.9657142857142857
N2     0.0280134    0.0  50.0  3000.0  987.0               0.18
O2     0.031999     0.0  50.0  3000.0  844.2857142857142   0.24571428571428572
He     0.0040026    0.0  1.0   1.0e5   5193.0
ideal  8.314462618  0.0  1e-9  1.0e9   3.5
)";

}  // namespace

std::vector<SpeciesData> parse_species_table(std::istream& in) {
  std::vector<SpeciesData> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    SpeciesData s;
    if (!(ss >> s.name)) continue;
    if (!(ss >> s.molar_mass >> s.e0 >> s.t_min >> s.t_max))
      throw ConfigError("species table line " + std::to_string(lineno) +
                        ": expected name molar_mass e0 t_min t_max cp...");
    double c;
    while (ss >> c) s.cp_coeffs.push_back(c);
    if (!ss.eof())
      throw ConfigError("species table line " + std::to_string(lineno) + ": bad number");
    if (s.cp_coeffs.empty())
      throw ConfigError("species table line " + std::to_string(lineno) + ": no cp coefficients");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SpeciesData> load_species_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open species table '" + path + "'");
  return parse_species_table(f);
}

const std::vector<SpeciesData>& builtin_species() {
  static const std::vector<SpeciesData> table = [] {
    std::istringstream ss(kBuiltinTable);
    return parse_species_table(ss);
  }();
  return table;
}

}  // namespace esdf
