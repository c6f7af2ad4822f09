#pragma once

// Benchmark initial conditions, normal-shock relations and run diagnostics.

#include "esdf/solver.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace esdf {

struct CaseSetup {
  std::string id;
  MeshSpec mesh;
  std::vector<std::string> species;
  RunConfig run;
  /// Primitive state at a point.
  std::function<PrimitiveState(const GasMixture&, const Vector2&)> init;
};

/// Case ids: "res1" (periodic discontinuity), "res2" (moving interface),
/// "res3" (shock-bubble). Long forms such as "res1-periodic-discontinuity"
/// are accepted.
CaseSetup make_case(std::string_view id);
std::string canonical_case_id(std::string_view id);

CaseSetup res1_setup();
CaseSetup res2_setup();
CaseSetup res3_setup();

/// Conserved states at cell centres.
std::vector<Vec> initialize(const Mesh& mesh, const GasMixture& mix, const CaseSetup& setup);

/// Builds the initial mesh, refining on the initial density up to the
/// configured AMR level, and the matching initial solver.
Solver build_solver(const CaseSetup& setup);

struct NormalShock {
  double p_ratio;
  double T_ratio;
  double rho_ratio;
  double M2;
};

NormalShock normal_shock_ratios(double M1, double gamma);

/// Post-shock primitive state behind a shock running into gas at rest in
/// the -x direction. Velocity is M2 c2 - M1 c1 with c = sqrt(gamma r T).
PrimitiveState normal_shock_state(double M1, const PrimitiveState& pre, const GasMixture& mix,
                                  double gamma);

struct InterfaceTrack {
  double downstream = 0.0;
  double jet = 0.0;
  double upstream = 0.0;
  bool valid = false;
};

/// Y >= threshold contour points of a 2D mass-fraction field, sampled on the
/// finest level with linear interpolation between cell centres.
InterfaceTrack track_interface_points(const Mesh& mesh, std::span<const double> Y,
                                      double threshold = 0.5);

/// x position where a 1D profile along the top row of the mesh first drops
/// from above `level` to below it, scanning from +x. Used for shock fronts.
std::optional<double> front_position(const Mesh& mesh, std::span<const double> f, double level);

struct EntropySample {
  double t;
  double S;
};

/// Delta s(t) = S(t) - S(0).
std::vector<EntropySample> entropy_history(const std::vector<EntropySample>& series);

/// Least-squares slope of log y against log x.
double convergence_fit(const std::vector<std::pair<double, double>>& points);

/// Least-squares slope of y against x.
double linear_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace esdf
