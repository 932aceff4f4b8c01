#pragma once

// 1D phase-field model
//   rho_t = rho_xx - W'(rho)/eps^2 - P rho_x + F(t)/eps   (+ lambda in cell mode)
//   P_t   = eps P_xx - P/eps - beta rho_x
// on a window [-L, L] that follows the interface in whole-cell shifts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "motility/potentials.hpp"
#include "motility/sil1d.hpp"

namespace motility {

struct FieldState1D {
  UniformGrid grid;     // window coordinates
  double offset = 0.0;  // physical x = offset + grid.at(i)
  std::vector<double> rho;
  std::vector<double> P;
  double t = 0.0;
  double eps = 0.0;

  double x_at(std::size_t i) const { return offset + grid.at(i); }
};

struct InterfaceTrack {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> V_est;
  std::vector<double> F;
};

struct Snapshot1D {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> P;
};

struct ResidualDecomposition {
  double t = 0.0;
  std::vector<double> y;
  std::vector<double> u;
  double u_norm_L2 = 0.0;
  double orthogonality = 0.0;
};

struct Pde1dConfig {
  Potential potential = Potential::symmetric_quartic();
  double eps = 0.02;
  double beta = 0.0;
  Schedule forcing = Schedule::constant(0.0);
  double t_end = 1.0;
  double half_length = 1.0;
  int cells_per_eps = 8;
  /// P(x,0) = Psi0(x/eps; V) for this V; none leaves P(x,0) = 0.
  std::optional<double> initial_velocity;
  double initial_position = 0.0;
  /// Amplitude of seeded N(0,1) noise v in rho(x,0) = theta0(x/eps) + eps v.
  double perturbation = 0.0;
  std::uint64_t seed = 1;
  double sample_interval = 0.0;  // 0 selects t_end / 1000
  std::size_t snapshot_stride = 0;  // 0 disables field snapshots
  bool recenter = true;
  bool residuals = false;
};

struct Pde1dResult {
  FieldState1D final_state;
  InterfaceTrack track;
  std::vector<Snapshot1D> snapshots;
  std::vector<ResidualDecomposition> residuals;
  double dt = 0.0;
  std::size_t steps = 0;
  bool dt_refined = false;
  std::size_t bound_violations = 0;  // logged samples with rho outside the eps^{1/4} band
};

/// Time step rule: min(0.2 eps^2, 0.25 dx^2 / eps).
double pde1d_time_step(double eps, double dx);

Pde1dResult simulate_1d(const Pde1dConfig& config);

/// rho = 1/2 crossing by linear interpolation plus one Newton step on the
/// local cubic. Throws NumericalError on zero or several crossings.
double track_interface(const FieldState1D& state);

/// Residual u of rho = theta0(y) + eps psi + eps u around x_interface, with the
/// theta0' component projected out.
ResidualDecomposition decompose_residual(const FieldState1D& state, double x_interface, double F,
                                         const StandingWaveProfile& profile);

/// Small root of W'(well + d) = eps F near the well, d returned (= eps psi).
double well_shift(const Potential& potential, double well, double eps_F);

/// Centered differences smoothed by a 5-sample moving average.
std::vector<double> smoothed_velocity(const std::vector<double>& t, const std::vector<double>& x);

struct PdeJump {
  std::size_t index = 0;  // sample with the largest |dV| in the transition
  double t = 0.0;
  double F = 0.0;
  double V_before = 0.0;
  double V_after = 0.0;
};

/// Fast transitions in a track: runs of samples where |dV| exceeds slope_limit
/// times the mean |dF| per sample, merged when closer than `merge` samples.
/// Samples earlier than t0 + settle are skipped. t and F are taken at the
/// steepest sample, V_before and V_after at the ends of the run.
std::vector<PdeJump> detect_jumps(const InterfaceTrack& track, double slope_limit,
                                  std::size_t merge = 20, double settle = 0.0);

struct CellConfig {
  Potential potential = Potential::asymmetric_sextic();
  double eps = 0.02;
  double beta = 0.0;
  double half_width = 0.0;  // a; 0 selects 20 eps
  double half_length = 0.0;  // L; 0 selects 4 a
  int cells_per_eps = 8;
  double t_end = 1.0;
  double sample_interval = 0.0;  // 0 selects t_end / 1000
  std::size_t snapshot_stride = 0;
  bool recenter = true;
};

struct CellSample {
  double t = 0.0;
  double x_back = 0.0;
  double x_front = 0.0;
  double mass = 0.0;
  double lambda = 0.0;
};

struct CellResult {
  FieldState1D final_state;
  std::vector<CellSample> samples;
  std::vector<Snapshot1D> snapshots;
  double velocity = 0.0;     // mean slope of both interfaces over the final quarter
  double width_drift = 0.0;  // final width - initial width
  double mass_drift = 0.0;   // relative
  double dt = 0.0;
  bool dt_refined = false;
  std::size_t bound_violations = 0;
};

/// Mass-conserving Pi-shaped cell theta0((x+a)/eps) theta0((a-x)/eps), F = 0.
CellResult simulate_two_interface_cell(const CellConfig& config);

}  // namespace motility
