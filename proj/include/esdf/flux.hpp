#pragma once

// Two-point interface fluxes. All fluxes are per unit face area and use the
// conserved-vector layout.

#include "esdf/entropy_state.hpp"

#include <cstdint>
#include <string_view>

namespace esdf {

enum class Scheme { lf, ec, esdf_central, esdf };

Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme s);

enum class DissipationMode { none, hybrid, full_lf };

struct DissipationSpec {
  DissipationMode mode = DissipationMode::hybrid;
  /// Energy entries z_k of the species eigenvectors from the frozen caloric
  /// EoS (z_k = 0) rather than the full mixture EoS.
  bool frozen_eos = true;
};

/// Which of the two printed face-pressure averages the ES/DF flux uses.
enum class FacePressure { p_theta, rho_beta };

/// One side of a face: decoded primitives plus the conserved vector that
/// goes with them (re-encoded with the evaluating cell's frozen pair in
/// Double-Flux mode).
struct SideState {
  PrimitiveState w;
  Vec u;
};

SideState make_side(const PrimitiveState& w, const Layout& L, const FrozenPair& fp);

// --- logarithmic mean ---------------------------------------------------

/// Ismail-Roe logarithmic mean. Throws DomainError for non-positive input.
double log_mean(double a_l, double a_r);

/// Per-thread count of log_mean calls.
std::uint64_t log_mean_calls();
void reset_log_mean_calls();

// --- fluxes -------------------------------------------------------------

Vec physical_flux(const SideState& s, const Layout& L, const FaceNormal& fn);

/// Multicomponent Chandrashekar-type entropy-conservative flux.
Vec ec_flux(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix,
            const Layout& L, const FaceNormal& fn);

double ec_pressure(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix);

struct FaceAverages {
  double rho_ln;
  double beta_ln;
  double p_bar;
  Vector2 v_bar;
  double vn_bar;
  double v2_avg;   // arithmetic mean of |v|^2
  SpeciesArray Y_bar;
};

FaceAverages face_averages(const PrimitiveState& wl, const PrimitiveState& wr, const Layout& L,
                           const FaceNormal& fn, FacePressure fpr = FacePressure::p_theta);

Vec esdf_central_flux(const PrimitiveState& wl, const PrimitiveState& wr, const Layout& L,
                      const FaceNormal& fn, const FrozenPair& fp,
                      FacePressure fpr = FacePressure::p_theta);

/// Columns of R: n-1 species, acoustic(-), entropy, shear (2D), acoustic(+).
/// The face composition is built from log-mean partial densities.
struct Eigensystem {
  Mat R;            // right eigenvectors, columns
  Vec lambda;       // KEPES eigenvalues (signed)
  Mat T;            // block-diagonal part of R^-1 A0 R^-T
  Mat T_full;       // R^-1 A0 R^-T
  Mat A0;           // analytic symmetrizer at the face state
  PrimitiveState face;
  double p_bar;
  double c_bar;
  double lambda_max;
};

/// Eigenvector group of column k: 0 for the species/entropy/shear group
/// (eigenvalue v_n), 1 for acoustic(-), 2 for acoustic(+).
int eigen_group(const Layout& L, int k);

Eigensystem eigensystem(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix,
                        const Layout& L, const FaceNormal& fn, const FrozenPair& fp,
                        FacePressure fpr = FacePressure::p_theta, bool frozen_eos = true,
                        bool with_scaling = true);

/// Gauss-Jordan inverse with partial pivoting for state-sized matrices.
/// Throws UnstableStateError when singular.
Mat small_inverse(const Mat& a);

/// theta = clamp(sqrt(|[[p]]| / (2 p_bar)), 0, 1)
double pressure_blend(double p_l, double p_r, double p_bar);

/// Symmetric PSD matrix M with dissipation d = 1/2 M [[v]]. Equals
/// R |Lambda| T R^T when T is diagonal.
Mat dissipation_matrix(const Eigensystem& es, double theta);

Vec hybrid_dissipation(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix,
                       const Layout& L, const FaceNormal& fn, const FrozenPair& fp,
                       const DissipationSpec& spec, FacePressure fpr = FacePressure::p_theta);

Vec esdf_flux(const PrimitiveState& wl, const PrimitiveState& wr, const GasMixture& mix,
              const Layout& L, const FaceNormal& fn, const FrozenPair& fp,
              const DissipationSpec& spec, FacePressure fpr = FacePressure::p_theta);

Vec lax_friedrichs_flux(const SideState& l, const SideState& r, const Layout& L,
                        const FaceNormal& fn);

/// [[v]] . F - [[psi . n]]; zero for entropy-conservative, negative for
/// entropy-stable fluxes.
double entropy_residual(const PrimitiveState& wl, const PrimitiveState& wr, const Vec& flux,
                        const GasMixture& mix, const Layout& L, const FaceNormal& fn);

/// Scale used to normalise entropy residuals, the size of the terms that
/// cancel in it: sum (|v_k,L| + |v_k,R|) |F_k| + |psi_L.n| + |psi_R.n|.
double entropy_residual_scale(const PrimitiveState& wl, const PrimitiveState& wr, const Vec& flux,
                              const GasMixture& mix, const Layout& L, const FaceNormal& fn);

struct FluxOptions {
  Scheme scheme = Scheme::esdf;
  DissipationSpec dissipation{};
  FacePressure face_pressure = FacePressure::p_theta;
};

/// Dispatches on scheme. `fp` is the frozen pair used by the ES/DF fluxes
/// and for encoding the conserved vectors needed by physical/LF fluxes.
Vec numerical_flux(const FluxOptions& opt, const SideState& l, const SideState& r,
                   const GasMixture& mix, const Layout& L, const FaceNormal& fn,
                   const FrozenPair& fp);

/// Test hook for mutation checks: flips the sign of the dissipation term on
/// the calling thread.
void set_dissipation_sign_flip(bool on);
bool dissipation_sign_flip();

}  // namespace esdf
