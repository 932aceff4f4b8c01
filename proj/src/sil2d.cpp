#include "motility/sil2d.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "motility/kernel.hpp"

namespace motility {

struct PhiTable::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
};

PhiTable::PhiTable(double beta, const StandingWaveProfile& profile, double half_range, std::size_t nodes)
    : beta_(beta), profile_(&profile), nodes_(nodes) {
  if (nodes < 5 || nodes % 2 == 0) throw std::invalid_argument("PhiTable: need an odd node count >= 5");
  if (!(half_range > 0.0)) throw std::invalid_argument("PhiTable: half_range must be > 0");
  step_ = 2.0 * half_range / static_cast<double>(nodes - 1);
  build(half_range);
}

PhiTable::~PhiTable() = default;
PhiTable::PhiTable(PhiTable&&) noexcept = default;
PhiTable& PhiTable::operator=(PhiTable&&) noexcept = default;

void PhiTable::build(double half_range) {
  const auto count = static_cast<std::size_t>(std::llround(2.0 * half_range / step_)) + 1;
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k)
    values[k] = phi_beta(-half_range + static_cast<double>(k) * step_, beta_, *profile_);
  spline_ = std::make_unique<Spline>(
      Spline{boost::math::interpolators::cardinal_cubic_b_spline<double>(values.begin(), values.end(),
                                                                        -half_range, step_)});
  half_range_ = half_range;
}

void PhiTable::ensure(double V) {
  if (std::abs(V) <= half_range_) return;
  if (!std::isfinite(V) || std::abs(V) > kDefaultVelocityCap) {
    std::ostringstream os;
    os << "PhiTable: |V| = " << std::abs(V) << " beyond the velocity cap " << kDefaultVelocityCap;
    throw std::invalid_argument(os.str());
  }
  double r = half_range_;
  while (r < std::abs(V)) r *= 2.0;
  build(std::min(r, kDefaultVelocityCap));
}

double PhiTable::operator()(double V) {
  if (beta_ == 0.0) return 0.0;
  ensure(V);
  return spline_->s(V);
}

double PhiTable::prime(double V) {
  if (beta_ == 0.0) return 0.0;
  ensure(V);
  return spline_->s.prime(V);
}

CurveGeometry curvature_and_normals(const std::vector<Point2>& c) {
  const std::size_t n = c.size();
  if (n < 16) throw std::invalid_argument("curvature_and_normals: need at least 16 nodes");
  CurveGeometry g;
  g.kappa.resize(n);
  g.normal.resize(n);
  g.ds.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p0 = c[(i + n - 1) % n];
    const Point2& p1 = c[i];
    const Point2& p2 = c[(i + 1) % n];
    const double ax = p1[0] - p0[0], ay = p1[1] - p0[1];
    const double bx = p2[0] - p1[0], by = p2[1] - p1[1];
    const double cx = p2[0] - p0[0], cy = p2[1] - p0[1];
    const double la = std::hypot(ax, ay), lb = std::hypot(bx, by), lc = std::hypot(cx, cy);
    const double cross = ax * by - ay * bx;
    g.kappa[i] = std::abs(cross) <= 1e-14 * la * lb ? 0.0 : 2.0 * cross / (la * lb * lc);
    g.normal[i] = {-cy / lc, cx / lc};
    g.ds[i] = 0.5 * (la + lb);
  }
  return g;
}

namespace {

struct NodeRoot {
  double V;
  bool ambiguous;
};

// Root of c0 (V - kappa + lambda) - Phi(V) nearest to `start`.
NodeRoot nearest_root(PhiTable& phi, double kappa, double lambda, double start, const NodalOptions& o) {
  const double c0 = phi.c0();
  auto G = [&](double V) { return c0 * (V - kappa + lambda) - phi(V); };
  const double g0 = G(start);
  if (g0 == 0.0) return {start, false};
  const double reach = kDefaultVelocityCap - std::abs(start);

  auto search = [&](double dir, double limit) -> std::optional<double> {
    double a = start, ga = g0;
    for (double d = o.scan_step; d <= limit; d += o.scan_step) {
      const double b = start + dir * d;
      if (std::abs(b) > kDefaultVelocityCap) break;
      const double gb = G(b);
      if ((ga > 0.0) != (gb > 0.0) || gb == 0.0) return polish_root(G, a, b, ga, gb, 1e-13);
      a = b;
      ga = gb;
    }
    return std::nullopt;
  };

  const auto up = search(+1.0, reach);
  const double down_limit = up ? std::abs(*up - start) + o.capture_radius : reach;
  const auto down = search(-1.0, down_limit);
  if (!up && !down) {
    std::ostringstream os;
    os << "solve_nodal_velocities: no root near V = " << start << " (kappa = " << kappa << ", lambda = " << lambda << ")";
    throw NumericalError(os.str());
  }
  if (up && down) {
    const bool ambiguous = std::abs(*up - start) <= o.capture_radius && std::abs(*down - start) <= o.capture_radius;
    return {std::abs(*up - start) <= std::abs(*down - start) ? *up : *down, ambiguous};
  }
  return {up ? *up : *down, false};
}

}  // namespace

NodalSolution solve_nodal_velocities(const std::vector<Point2>& curve, const CurveGeometry& geo, PhiTable& phi,
                                     const std::vector<double>& V_prev, const NodalOptions& o) {
  (void)curve;
  const std::size_t n = geo.kappa.size();
  const double c0 = phi.c0();
  double total = 0.0;
  for (double s : geo.ds) total += s;
  auto mean = [&](const std::vector<double>& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += geo.ds[i] * f[i];
    return m / total;
  };

  NodalSolution sol;
  sol.V.assign(n, 0.0);
  if (phi.beta() == 0.0) {
    sol.lambda = mean(geo.kappa);
    for (std::size_t i = 0; i < n; ++i) sol.V[i] = geo.kappa[i] - sol.lambda;
    sol.iterations = 1;
  } else {
    std::vector<double> start = V_prev.size() == n ? V_prev : std::vector<double>(n, 0.0);
    std::vector<double> trial(n);
    std::size_t ambiguous = 0;
    auto velocities = [&](double lambda) {
      ambiguous = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = nearest_root(phi, geo.kappa[i], lambda, start[i], o);
        trial[i] = r.V;
        if (r.ambiguous) ++ambiguous;
      }
      return mean(trial);
    };
    std::vector<double> shifted(n);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = geo.kappa[i] + phi(start[i]) / c0;
    // mean V is decreasing in lambda; secant safeguarded by a bracket, bisection when it leaves it
    double l1 = mean(shifted);
    double m1 = velocities(l1);
    double l0 = l1 + m1, m0 = velocities(l0);
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    auto note = [&](double l, double m) {
      if (m > 0.0) lo = std::max(lo, l);
      else hi = std::min(hi, l);
    };
    note(l1, m1);
    note(l0, m0);
    std::swap(l0, l1);
    std::swap(m0, m1);
    int it = 2;
    while (std::abs(m1) > 0.1 * o.tol && it < o.max_iter) {
      double next = m1 != m0 ? l1 - m1 * (l1 - l0) / (m1 - m0) : l1 + m1;
      if (std::isfinite(lo) && std::isfinite(hi)) {
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lo))) {
          // a node changes branch inside the bracket: no exact zero of the mean
          sol.discontinuous = true;
          break;
        }
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      } else if (!std::isfinite(next)) {
        next = l1 + m1;
      }
      l0 = l1;
      m0 = m1;
      l1 = next;
      m1 = velocities(l1);
      note(l1, m1);
      ++it;
    }
    if (std::abs(m1) > 0.1 * o.tol && !sol.discontinuous) {
      std::size_t worst = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(trial[i]) > std::abs(trial[worst])) worst = i;
      std::ostringstream os;
      os << "solve_nodal_velocities: no convergence after " << it << " iterations (mean V = " << m1
         << ", worst node " << worst << ")";
      throw NumericalError(os.str());
    }
    sol.V = trial;
    sol.lambda = l1;
    sol.ambiguous = ambiguous;
    sol.iterations = it;
  }

  // exact zero flux, absorbed into lambda
  const double m = mean(sol.V);
  for (double& v : sol.V) v -= m;
  sol.lambda += m;

  for (std::size_t i = 0; i < n; ++i)
    sol.residual = std::max(sol.residual, std::abs(sol.V[i] - geo.kappa[i] - phi(sol.V[i]) / c0 + sol.lambda));
  return sol;
}

namespace {

// Cyclic tridiagonal solve (Sherman-Morrison); corner entries lower_left = A[n-1][0], upper_right = A[0][n-1].
std::vector<double> solve_cyclic(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                 double lower_left, double upper_right, const std::vector<double>& r) {
  const std::size_t n = b.size();
  const double gamma = -b[0];
  b[0] -= gamma;
  b[n - 1] -= lower_left * upper_right / gamma;
  auto x = solve_tridiagonal(a, b, c, r);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = lower_left;
  auto z = solve_tridiagonal(a, b, c, u);
  const double fact = (x[0] + upper_right * x[n - 1] / gamma) / (1.0 + z[0] + upper_right * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

// Second derivatives of the periodic cubic spline through f at knots with spacings h.
std::vector<double> periodic_moments(const std::vector<double>& f, const std::vector<double>& h) {
  const std::size_t n = f.size();
  std::vector<double> a(n), b(n), c(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
    a[i] = h[im];
    b[i] = 2.0 * (h[im] + h[i]);
    c[i] = h[i];
    r[i] = 6.0 * ((f[ip] - f[i]) / h[i] - (f[i] - f[im]) / h[im]);
  }
  return solve_cyclic(a, b, c, h[n - 1], h[n - 1], r);
}

}  // namespace

std::vector<Point2> resample_uniform(const std::vector<Point2>& curve, std::size_t n_out) {
  const std::size_t n = curve.size();
  if (n < 4 || n_out < 4) throw std::invalid_argument("resample_uniform: too few nodes");
  std::vector<double> h(n), u(n + 1, 0.0), x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = curve[i];
    const auto& q = curve[(i + 1) % n];
    h[i] = std::hypot(q[0] - p[0], q[1] - p[1]);
    if (!(h[i] > 0.0)) throw NumericalError("resample_uniform: repeated node");
    u[i + 1] = u[i] + h[i];
    x[i] = p[0];
    y[i] = p[1];
  }
  const double L = u[n];
  const auto Mx = periodic_moments(x, h);
  const auto My = periodic_moments(y, h);
  std::vector<Point2> out(n_out);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n_out; ++k) {
    const double s = L * static_cast<double>(k) / static_cast<double>(n_out);
    while (seg + 1 < n && u[seg + 1] <= s) ++seg;
    const std::size_t nx = (seg + 1) % n;
    const double hs = h[seg];
    const double A = (u[seg + 1] - s), B = (s - u[seg]);
    auto eval = [&](const std::vector<double>& f, const std::vector<double>& M) {
      return M[seg] * A * A * A / (6.0 * hs) + M[nx] * B * B * B / (6.0 * hs) +
             (f[seg] / hs - M[seg] * hs / 6.0) * A + (f[nx] / hs - M[nx] * hs / 6.0) * B;
    };
    out[k] = {eval(x, Mx), eval(y, My)};
  }
  return out;
}

std::vector<Point2> make_circle(double cx, double cy, double radius, std::size_t n) {
  std::vector<Point2> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    c[k] = {cx + radius * std::cos(a), cy + radius * std::sin(a)};
  }
  return c;
}

std::vector<Point2> make_ellipse(double cx, double cy, double a, double b, std::size_t n) {
  // arclength table on a fine parameter grid, then uniform targets
  const std::size_t fine = 200 * n;
  std::vector<double> s(fine + 1, 0.0);
  auto at = [&](double t) { return Point2{cx + a * std::cos(t), cy + b * std::sin(t)}; };
  const double dt = 2.0 * std::numbers::pi / static_cast<double>(fine);
  for (std::size_t k = 0; k < fine; ++k) {
    // Simpson on |r'(t)|
    auto speed = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
    const double t0 = dt * static_cast<double>(k);
    s[k + 1] = s[k] + dt / 6.0 * (speed(t0) + 4.0 * speed(t0 + 0.5 * dt) + speed(t0 + dt));
  }
  std::vector<Point2> c(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = s[fine] * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < fine && s[seg + 1] <= target) ++seg;
    const double frac = (target - s[seg]) / (s[seg + 1] - s[seg]);
    c[k] = at(dt * (static_cast<double>(seg) + frac));
  }
  return c;
}

CurveRun evolve_curve(std::vector<Point2> curve, double dt, double t_end, PhiTable& phi, const EvolveOptions& o) {
  const std::size_t n = curve.size();
  if (n < 16) throw std::invalid_argument("evolve_curve: need at least 16 nodes");
  if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("evolve_curve: dt and t_end must be > 0");
  if (!is_simple(curve) || signed_area(curve) <= 0.0)
    throw std::invalid_argument("evolve_curve: curve must be simple and counterclockwise");
  double ds_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = curve[i];
    const auto& q = curve[(i + 1) % n];
    ds_min = std::min(ds_min, std::hypot(q[0] - p[0], q[1] - p[1]));
  }
  if (dt > 0.25 * ds_min * ds_min * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "evolve_curve: dt = " << dt << " exceeds 0.25 ds^2 = " << 0.25 * ds_min * ds_min;
    throw std::invalid_argument(os.str());
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  dt = t_end / static_cast<double>(steps);

  CurveRun run;
  run.dt = dt;
  std::vector<double> V_prev;
  auto solve = [&](double t, bool record) {
    const auto geo = curvature_and_normals(curve);
    auto sol = solve_nodal_velocities(curve, geo, phi, V_prev, o.nodal);
    double flux = 0.0, per = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      flux += geo.ds[i] * sol.V[i];
      per += geo.ds[i];
    }
    run.max_residual = std::max(run.max_residual, sol.residual);
    run.max_flux = std::max(run.max_flux, std::abs(flux) / per);
    if (sol.ambiguous > 0 || sol.discontinuous) ++run.ambiguous_events;
    if (record)
      run.samples.push_back({t, curve, sol.V, geo.kappa, sol.lambda, signed_area(curve), perimeter(curve), flux});
    V_prev = sol.V;
    return std::pair{geo, std::move(sol)};
  };

  for (std::size_t step = 0; step < steps; ++step) {
    const double t = dt * static_cast<double>(step);
    auto [geo, sol] = solve(t, step % o.record_every == 0);
    for (std::size_t i = 0; i < n; ++i) {
      curve[i][0] += dt * sol.V[i] * geo.normal[i][0];
      curve[i][1] += dt * sol.V[i] * geo.normal[i][1];
    }
    if (o.resample) curve = resample_uniform(curve, n);
    if (!is_simple(curve)) {
      std::ostringstream os;
      os << "evolve_curve: self-intersection at t = " << t + dt;
      throw SelfIntersection(os.str(), t + dt, curve);
    }
  }
  solve(t_end, true);
  run.steps = steps;
  return run;
}

}  // namespace motility
