#pragma once

// 2D phase-field cell on the rectangle [0,Lx] x [0,Ly]:
//   rho_t = Lap rho - W'(rho)/eps^2 - P . grad rho + lambda(t)
//   P_t   = eps Lap P - P/eps - beta grad rho
// zero flux for rho, P = 0 on the boundary, lambda the volume multiplier.
// Cell-centred grid, fields stored row-major as f[j * nx + i].

#include <cstddef>
#include <string>
#include <vector>

#include "motility/contour.hpp"
#include "motility/potentials.hpp"

namespace motility {

struct FieldState2D {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;  // = dy
  std::vector<double> rho;
  std::vector<double> Px;
  std::vector<double> Py;
  double t = 0.0;
  double eps = 0.0;
  double beta = 0.0;

  double x_at(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx; }
  double y_at(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dx; }
  double cell_area() const { return dx * dx; }
  double domain_area() const { return static_cast<double>(nx * ny) * dx * dx; }
};

/// Empty state with the given grid; all fields zero.
FieldState2D make_state_2d(std::size_t nx, std::size_t ny, double dx, double eps, double beta);

/// Mean over the domain of W'(rho)/eps^2 + P . grad rho (midpoint rule, centred gradients).
double lagrange_multiplier(const FieldState2D& state, const Potential& potential);

struct Energies {
  double E = 0.0;  // eps/2 int |grad rho|^2 + 1/eps int W(rho)
  double F = 0.0;  // int |P|^2 + |P|^4
};
Energies energies(const FieldState2D& state, const Potential& potential);

/// rho = 1/2 level curve of the state.
Contour extract_contour(const FieldState2D& state);

struct Monitor2D {
  double t = 0.0;
  double mass = 0.0;
  double E = 0.0;
  double F = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double lambda = 0.0;
};

struct Pde2dConfig {
  Potential potential = Potential::symmetric_quartic();
  double eps = 0.04;
  double beta = 10.0;
  std::size_t nx = 256;
  std::size_t ny = 256;
  double length_x = 1.0;
  double length_y = 1.0;
  double radius = 0.25;
  double center_x = 0.5;
  double center_y = 0.5;
  double t_end = 0.05;
  std::size_t contour_stride = 10;   // steps between extracted contours (0 disables)
  std::size_t snapshot_stride = 0;   // steps between field snapshots (0 disables)
};

struct Pde2dResult {
  FieldState2D final_state;
  std::vector<Monitor2D> monitors;  // every step, including t = 0
  std::vector<std::pair<double, Contour>> contours;
  std::vector<FieldState2D> snapshots;
  double dt = 0.0;
  std::size_t steps = 0;
  bool dt_refined = false;
  std::size_t band_violations = 0;  // steps with rho outside [-eps^{1/4}, 1 + eps^{1/4}]
};

/// Throws std::invalid_argument on invalid grids or a cell closer than 5 eps to the boundary.
void validate_pde2d(const Pde2dConfig& config);

Pde2dResult simulate_2d(const Pde2dConfig& config);

}  // namespace motility
