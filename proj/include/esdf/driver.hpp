#pragma once

// Case execution with diagnostics; shared by the CLI and the tests.

#include "esdf/config.hpp"
#include "esdf/io.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace esdf {

struct RunResult {
  bool ok = true;
  std::string message;
  long steps = 0;
  double t = 0.0;
  double wall_seconds = 0.0;
  double S0 = 0.0;
  double S = 0.0;
  double dS = 0.0;
  /// Max over cells and recorded steps; only when p and v start uniform.
  bool uniform_start = false;
  double p_max_dev = 0.0;
  double v_max_dev = 0.0;
  /// |M_i(t) + outflow_i - M_i(0)| / M_i(0) per species, then total mass.
  std::vector<double> mass_rel_err;
  long retries = 0;
  long floored = 0;
  /// Pressure-front samples (t, x) along the top row, 2D cases.
  std::vector<std::pair<double, double>> shock_front;
  /// (t, downstream, jet, upstream) for the helium interface.
  std::vector<std::array<double, 4>> track;
  std::string summary;
};

struct RunHooks {
  bool write_files = true;
  std::function<void(const Solver&)> observer;
  std::ostream* log = nullptr;
};

std::vector<std::string> conserved_names(const GasMixture& mix, int dim);

/// Runs the request to t_end. Unstable-state failures are reported in the
/// result (ok = false) rather than thrown.
RunResult run_request(const RunRequest& req, const RunHooks& hooks = {});

/// Shock-bubble pressure level used for front detection: the midpoint of
/// the pre- and post-shock pressures.
double shock_front_level(const CaseSetup& s);

}  // namespace esdf
