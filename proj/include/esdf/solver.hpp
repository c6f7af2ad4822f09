#pragma once

// Finite-volume residual, SSP-RK3 stepping and the Double-Flux bookkeeping.

#include "esdf/flux.hpp"
#include "esdf/mesh_amr.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace esdf {

enum class BcKind { periodic, inflow, outflow, slip_wall, symmetry };

BcKind parse_bc(std::string_view name);
std::string_view bc_name(BcKind k);

struct RunConfig {
  FluxOptions flux{};
  /// Per-cell frozen pairs with two face evaluations. When false the
  /// scheme is the conservative control: true-EoS decode and one face
  /// evaluation with the star pair at the face composition.
  bool double_flux = true;
  double cfl = 0.75;
  double dt_fixed = 0.0;  // > 0 selects fixed-step mode
  double t_end = 1.0;
  long max_steps = 100000000;
  std::array<BcKind, 4> bc{BcKind::periodic, BcKind::periodic, BcKind::periodic, BcKind::periodic};
  std::array<PrimitiveState, 4> inflow{};
  AmrConfig amr{};
  double p_floor = 0.0;
  bool resync_rewrite_energy = true;
  int threads = 0;                 // 0: OpenMP default
  bool serial_reference = false;   // scatter-based serial residual
};

struct SolverState {
  std::vector<Vec> u;
  std::vector<FrozenPair> fp;
  double t = 0.0;
  long step = 0;
};

struct ConservationTotals {
  Vec totals;     // sum V u over cells
  Vec outflow;    // time-integrated boundary outflow
  double entropy = 0.0;  // sum V U
};

/// Scratch reused across residual evaluations.
struct ResidualWork {
  std::vector<PrimitiveState> prim;
  std::vector<Vec> flux_l;   // flux seen by the face's left cell
  std::vector<Vec> flux_r;   // flux seen by the face's right cell
  long floored_cells = 0;
  long dual_evaluations = 0;
};

/// Ghost primitive state across boundary `side` for interior state w.
PrimitiveState ghost_state(const PrimitiveState& w, int side, const RunConfig& cfg,
                           const GasMixture& mix, int dim);

/// Decodes all cells (frozen caloric relation in Double-Flux mode).
void decode_cells(const Mesh& mesh, const GasMixture& mix, const RunConfig& cfg, const Layout& L,
                  const std::vector<Vec>& u, const std::vector<FrozenPair>& fp,
                  std::vector<PrimitiveState>& prim, long* floored = nullptr);

/// rhs_c = -(1/V_c) sum_f s F_f A_f. Optionally returns the boundary outflow
/// rate sum over boundary faces of the outward F A.
void spatial_residual(const Mesh& mesh, const GasMixture& mix, const RunConfig& cfg,
                      const Layout& L, const std::vector<Vec>& u,
                      const std::vector<FrozenPair>& fp, std::vector<Vec>& rhs,
                      ResidualWork& work, Vec* boundary_rate = nullptr);

/// Serial face-loop scatter version kept as the reference implementation.
void spatial_residual_serial(const Mesh& mesh, const GasMixture& mix, const RunConfig& cfg,
                             const Layout& L, const std::vector<Vec>& u,
                             const std::vector<FrozenPair>& fp, std::vector<Vec>& rhs,
                             ResidualWork& work, Vec* boundary_rate = nullptr);

double compute_dt(const Mesh& mesh, const GasMixture& mix, const RunConfig& cfg, const Layout& L,
                  const SolverState& s);

/// Star pairs from each cell's own state (used before step 0).
std::vector<FrozenPair> initial_frozen_pairs(const Mesh& mesh, const GasMixture& mix,
                                             const RunConfig& cfg, const Layout& L,
                                             const std::vector<Vec>& u);

/// Post-step update of the frozen pairs. Returns the number of cells whose
/// pair changed.
long double_flux_resync(const GasMixture& mix, const RunConfig& cfg, const Layout& L,
                        SolverState& s);

class Solver {
 public:
  Solver(Mesh mesh, GasMixture mix, RunConfig cfg, SolverState init);

  const Mesh& mesh() const { return mesh_; }
  const GasMixture& mixture() const { return mix_; }
  const RunConfig& config() const { return cfg_; }
  const Layout& layout() const { return L_; }
  const SolverState& state() const { return state_; }
  SolverState& state() { return state_; }

  double compute_dt() const;
  /// One SSP-RK3 step of size dt with the frozen pairs held fixed, followed
  /// by the resync. Retries once at dt/2 on an unstable state. Returns the
  /// step actually taken.
  double step(double dt);
  /// Adapts the mesh on the density indicator and remaps the state.
  void regrid();
  /// Runs to t_end, calling `observer` after every step.
  void run(const std::function<void(const Solver&)>& observer = {});

  ConservationTotals totals() const;
  const ConservationTotals& initial_totals() const { return initial_; }
  /// Primitive states of the current solution.
  std::vector<PrimitiveState> primitives() const;
  long retries() const { return retries_; }
  long floored_cells() const { return work_.floored_cells; }

 private:
  void rk3(double dt);
  void residual(const std::vector<Vec>& u, std::vector<Vec>& rhs, Vec* rate);

  Mesh mesh_;
  GasMixture mix_;
  RunConfig cfg_;
  Layout L_;
  SolverState state_;
  ResidualWork work_;
  ConservationTotals initial_;
  Vec outflow_;
  long retries_ = 0;
  std::vector<Vec> u0_, u1_, rhs_;
};

}  // namespace esdf
