#pragma once

// Closed-curve sharp-interface law V = kappa + Phi_beta(V)/c0 - lambda(t),
// lambda fixed by int V ds = 0; V is the inward normal velocity.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "motility/contour.hpp"
#include "motility/numerics.hpp"
#include "motility/potentials.hpp"

namespace motility {

/// Cubic B-spline of Phi_beta on a uniform V grid, widened on demand.
class PhiTable {
 public:
  PhiTable(double beta, const StandingWaveProfile& profile, double half_range = 10.0,
           std::size_t nodes = 401);
  ~PhiTable();
  PhiTable(PhiTable&&) noexcept;
  PhiTable& operator=(PhiTable&&) noexcept;

  double operator()(double V);
  double prime(double V);
  double half_range() const { return half_range_; }
  double beta() const { return beta_; }
  double c0() const { return profile_->c0; }

 private:
  void build(double half_range);
  void ensure(double V);

  double beta_;
  const StandingWaveProfile* profile_;
  double half_range_ = 0.0;
  std::size_t nodes_;
  double step_;
  struct Spline;
  std::unique_ptr<Spline> spline_;
};

struct CurveGeometry {
  std::vector<double> kappa;
  std::vector<Point2> normal;  // inward unit normal
  std::vector<double> ds;      // half the sum of the adjacent edge lengths
};

/// Circumscribed-circle curvature (1/R on a counterclockwise circle); needs >= 16 nodes.
CurveGeometry curvature_and_normals(const std::vector<Point2>& curve);

struct NodalSolution {
  std::vector<double> V;
  double lambda = 0.0;
  double residual = 0.0;        // max |V - kappa - Phi(V)/c0 + lambda|
  std::size_t ambiguous = 0;    // nodes with more than one root inside the capture radius
  int iterations = 0;
  bool discontinuous = false;  // a branch switch left no exact zero-flux lambda; residual shows the gap
};

struct NodalOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double capture_radius = 0.2;
  double scan_step = 0.02;
};

/// Per-node roots nearest V_prev (empty = zero), lambda from the zero-mean condition.
NodalSolution solve_nodal_velocities(const std::vector<Point2>& curve, const CurveGeometry& geometry,
                                     PhiTable& phi, const std::vector<double>& V_prev = {},
                                     const NodalOptions& options = {});

/// Uniform-arclength resampling through a periodic cubic spline in chord length.
std::vector<Point2> resample_uniform(const std::vector<Point2>& curve, std::size_t n);

std::vector<Point2> make_circle(double cx, double cy, double radius, std::size_t n);
/// Ellipse with semi-axes (a, b), resampled to uniform arclength.
std::vector<Point2> make_ellipse(double cx, double cy, double a, double b, std::size_t n);

struct CurveSample {
  double t = 0.0;
  std::vector<Point2> nodes;
  std::vector<double> V;
  std::vector<double> kappa;
  double lambda = 0.0;
  double area = 0.0;
  double perimeter = 0.0;
  double flux = 0.0;  // int V ds
};

struct CurveRun {
  std::vector<CurveSample> samples;
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t ambiguous_events = 0;
  double max_residual = 0.0;
  double max_flux = 0.0;  // max |int V ds| / perimeter over accepted steps
};

/// Raised when the evolved polygon stops being simple; carries the offending state.
class SelfIntersection : public NumericalError {
 public:
  SelfIntersection(const std::string& what, double t, std::vector<Point2> nodes)
      : NumericalError(what), t(t), nodes(std::move(nodes)) {}
  double t;
  std::vector<Point2> nodes;
};

struct EvolveOptions {
  std::size_t record_every = 1;
  bool resample = true;
  NodalOptions nodal{};
};

/// Explicit x <- x + dt V nu, then resampling; needs dt <= 0.25 ds^2.
CurveRun evolve_curve(std::vector<Point2> curve, double dt, double t_end, PhiTable& phi,
                      const EvolveOptions& options = {});

}  // namespace motility
