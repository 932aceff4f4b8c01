#pragma once

// Scalar sharp-interface laws in 1D:
//   single interface   c0 V = Phi_beta(V) - F
//   traveling cell     2 c0 V = Phi_beta(V) - Phi_beta(-V)
// plus the quasi-static hysteresis sweep across folds.

#include <cstddef>
#include <utility>
#include <vector>

#include "motility/kernel.hpp"

namespace motility {

enum class StabilityMode {
  Spectral,  // rightmost eigenvalue of the linearized operator
  Monotone,  // c0 > Phi_beta'(V)
};

struct RootOptions {
  double v_scan = 10.0;
  double v_step = 0.02;
  double tol = 1e-10;
  StabilityMode stability = StabilityMode::Spectral;
  /// Profile used for spectra; when null one is built at the stability default resolution.
  const StandingWaveProfile* spectral_profile = nullptr;
  double margin = 1e-6;
};

struct Root {
  double V = 0.0;
  bool stable = false;
  double phi_prime = 0.0;
};

struct RootSet {
  double F = 0.0;
  double beta = 0.0;
  std::vector<Root> roots;
};

/// g(V) = c0 V - Phi_beta(V) + F.
double sil_residual(double V, double F, double beta, const StandingWaveProfile& profile);

/// All sign changes of g on the scan grid, polished. Throws NumericalError when none.
RootSet sil_roots(double F, double beta, const StandingWaveProfile& profile,
                  const RootOptions& options = {});

/// Roots of h(V) = 2 c0 V - Phi_beta(V) + Phi_beta(-V), ascending; always contains 0.
std::vector<double> traveling_wave_roots(double beta, const StandingWaveProfile& profile,
                                         const RootOptions& options = {});

/// Smallest beta with Phi_beta'(0) > c0, by bisection to relative tolerance rel_tol.
double beta_critical(const StandingWaveProfile& profile, double beta_lo, double beta_hi,
                     double rel_tol = 1e-3);

/// c0 beta_ref / Phi_{beta_ref}'(0).
double beta_critical_closed_form(const StandingWaveProfile& profile, double beta_ref = 1.0);

struct Fold {
  double V = 0.0;
  double F = 0.0;  // forcing at which the fold sits: F = Phi_beta(V) - c0 V
};

/// Zeros of c0 - Phi_beta'(V) on [-v_scan, v_scan], ascending in V.
std::vector<Fold> fold_points(double beta, const StandingWaveProfile& profile,
                              double v_scan = 10.0, double v_step = 0.02);

/// Piecewise-linear forcing F(t) through the knots (t_i, F_i), constant outside.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::vector<std::pair<double, double>> knots);

  static Schedule constant(double F, double t_end = 1.0);
  /// F rises -2.25 -> -1 on [0,1] and retraces on [1,2].
  static Schedule hysteresis_loop(double F_low = -2.25, double F_high = -1.0);

  double operator()(double t) const;
  double t_begin() const { return knots_.front().first; }
  double t_end() const { return knots_.back().first; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }
  double max_abs() const;

 private:
  std::vector<std::pair<double, double>> knots_;
};

struct Jump {
  double t = 0.0;
  double F = 0.0;
  double V_before = 0.0;
  double V_after = 0.0;
};

struct HysteresisTrace {
  double beta = 0.0;
  std::vector<double> t;
  std::vector<double> F;
  std::vector<double> V;
  std::vector<int> branch_id;
  std::vector<int> jump_flag;
  std::vector<Jump> jumps;
  std::vector<Fold> folds;
};

struct HysteresisOptions {
  std::size_t samples_per_segment = 2000;
  double v_scan = 10.0;
  double v_step = 0.02;
  double capture_radius = 0.2;
  double tol = 1e-12;
  /// Grid size of the profile used by the relaxation that resolves jumps.
  std::size_t relax_points = 1001;
  double relax_t_end = 200.0;
};

/// Quasi-static continuation along the stable branches (c0 > Phi_beta'), with
/// jumps resolved by relaxing the reduced equation from the abandoned state.
HysteresisTrace run_hysteresis(const Schedule& schedule, double beta,
                               const StandingWaveProfile& profile, double V_start,
                               const HysteresisOptions& options = {});

/// Sum of (V_i + V_{i+1}) / 2 * (F_{i+1} - F_i) along the trace.
double loop_area(const HysteresisTrace& trace);

}  // namespace motility
