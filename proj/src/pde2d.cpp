#include "motility/pde2d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "motility/numerics.hpp"

namespace motility {

namespace {

enum class Boundary { ZeroFlux, ZeroValue };

// (I - c D2) along one direction, D2 with mirror (zero flux) or odd (zero value) ghosts.
TridiagonalLU implicit_1d(std::size_t n, double c, double dx, Boundary bc) {
  const double r = c / (dx * dx);
  std::vector<double> lo(n, -r), di(n, 1.0 + 2.0 * r), up(n, -r);
  const double end = bc == Boundary::ZeroFlux ? 1.0 + r : 1.0 + 3.0 * r;
  di.front() = end;
  di.back() = end;
  return TridiagonalLU(lo, di, up);
}

class Adi {
 public:
  Adi(std::size_t nx, std::size_t ny, double dx, double c, Boundary bc)
      : nx_(nx), ny_(ny), x_(implicit_1d(nx, c, dx, bc)), y_(implicit_1d(ny, c, dx, bc)), column_(ny) {}

  void solve(std::vector<double>& f) {
    for (std::size_t j = 0; j < ny_; ++j) x_.solve_in_place(std::span<double>(f.data() + j * nx_, nx_));
    for (std::size_t i = 0; i < nx_; ++i) {
      for (std::size_t j = 0; j < ny_; ++j) column_[j] = f[j * nx_ + i];
      y_.solve_in_place(column_);
      for (std::size_t j = 0; j < ny_; ++j) f[j * nx_ + i] = column_[j];
    }
  }

 private:
  std::size_t nx_, ny_;
  TridiagonalLU x_, y_;
  std::vector<double> column_;
};

// Centred gradient with mirror ghosts (zero normal derivative).
void gradient(const FieldState2D& s, std::vector<double>& gx, std::vector<double>& gy) {
  const std::size_t nx = s.nx, ny = s.ny;
  gx.resize(nx * ny);
  gy.resize(nx * ny);
  const double inv = 1.0 / (2.0 * s.dx);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      const double w = s.rho[i > 0 ? k - 1 : k];
      const double e = s.rho[i + 1 < nx ? k + 1 : k];
      const double so = s.rho[j > 0 ? k - nx : k];
      const double no = s.rho[j + 1 < ny ? k + nx : k];
      gx[k] = (e - w) * inv;
      gy[k] = (no - so) * inv;
    }
  }
}

}  // namespace

FieldState2D make_state_2d(std::size_t nx, std::size_t ny, double dx, double eps, double beta) {
  FieldState2D s;
  s.nx = nx;
  s.ny = ny;
  s.dx = dx;
  s.eps = eps;
  s.beta = beta;
  s.rho.assign(nx * ny, 0.0);
  s.Px.assign(nx * ny, 0.0);
  s.Py.assign(nx * ny, 0.0);
  return s;
}

double lagrange_multiplier(const FieldState2D& s, const Potential& potential) {
  std::vector<double> gx, gy;
  gradient(s, gx, gy);
  const double inv_eps2 = 1.0 / (s.eps * s.eps);
  double sum = 0.0;
  for (std::size_t k = 0; k < s.rho.size(); ++k)
    sum += potential.dW(s.rho[k]) * inv_eps2 + s.Px[k] * gx[k] + s.Py[k] * gy[k];
  return sum / static_cast<double>(s.rho.size());
}

Energies energies(const FieldState2D& s, const Potential& potential) {
  std::vector<double> gx, gy;
  gradient(s, gx, gy);
  Energies e;
  double grad2 = 0.0, well = 0.0, pol = 0.0;
  for (std::size_t k = 0; k < s.rho.size(); ++k) {
    grad2 += gx[k] * gx[k] + gy[k] * gy[k];
    well += potential.W(s.rho[k]);
    const double p2 = s.Px[k] * s.Px[k] + s.Py[k] * s.Py[k];
    pol += p2 + p2 * p2;
  }
  const double a = s.cell_area();
  e.E = (0.5 * s.eps * grad2 + well / s.eps) * a;
  e.F = pol * a;
  return e;
}

Contour extract_contour(const FieldState2D& s) {
  return single_closed_contour(s.rho, s.nx, s.ny, 0.5 * s.dx, 0.5 * s.dx, s.dx, s.dx, 0.5);
}

void validate_pde2d(const Pde2dConfig& c) {
  std::vector<std::string> bad;
  if (!(c.eps > 0.0)) bad.push_back("eps must be > 0");
  if (!(c.beta >= 0.0)) bad.push_back("beta must be >= 0");
  if (c.nx < 8 || c.ny < 8) bad.push_back("nx, ny must be >= 8");
  if (!(c.length_x > 0.0 && c.length_y > 0.0)) bad.push_back("domain lengths must be > 0");
  if (!(c.t_end > 0.0)) bad.push_back("t_end must be > 0");
  if (bad.empty()) {
    const double dx = c.length_x / static_cast<double>(c.nx);
    const double dy = c.length_y / static_cast<double>(c.ny);
    if (std::abs(dx - dy) > 1e-12 * dx) bad.push_back("cells must be square (length_x/nx == length_y/ny)");
    if (dx > c.eps / 6.0 * (1.0 + 1e-12)) bad.push_back("grid too coarse: need dx <= eps/6");
    const double gap = std::min({c.center_x - c.radius, c.length_x - c.center_x - c.radius,
                                 c.center_y - c.radius, c.length_y - c.center_y - c.radius});
    if (!(c.radius > 0.0)) bad.push_back("radius must be > 0");
    else if (gap < 5.0 * c.eps * (1.0 - 1e-12)) bad.push_back("cell must stay >= 5 eps from the boundary");
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "pde2d config:";
    for (const auto& b : bad) os << " " << b << ";";
    throw std::invalid_argument(os.str());
  }
}

Pde2dResult simulate_2d(const Pde2dConfig& cfg) {
  validate_pde2d(cfg);
  const auto profile = standing_wave(cfg.potential);
  const double dx = cfg.length_x / static_cast<double>(cfg.nx);
  const double eps = cfg.eps;
  FieldState2D s = make_state_2d(cfg.nx, cfg.ny, dx, eps, cfg.beta);
  for (std::size_t j = 0; j < s.ny; ++j)
    for (std::size_t i = 0; i < s.nx; ++i) {
      const double r = std::hypot(s.x_at(i) - cfg.center_x, s.y_at(j) - cfg.center_y);
      s.rho[j * s.nx + i] = profile.theta_at((cfg.radius - r) / eps);
    }

  Pde2dResult res;
  double dt = 0.2 * eps * eps;
  std::size_t steps_left = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
  dt = cfg.t_end / static_cast<double>(steps_left);
  std::size_t contour_stride = cfg.contour_stride;
  std::size_t snapshot_stride = cfg.snapshot_stride;

  auto build = [&](double step) {
    return std::pair{Adi(s.nx, s.ny, dx, step, Boundary::ZeroFlux),
                     Adi(s.nx, s.ny, dx, eps * step, Boundary::ZeroValue)};
  };
  auto [rho_adi, p_adi] = build(dt);

  const double band = std::pow(eps, 0.25);
  const double lx = cfg.length_x, ly = cfg.length_y;
  auto monitor = [&](double lambda) {
    const auto [lo, hi] = std::minmax_element(s.rho.begin(), s.rho.end());
    double mass = 0.0;
    for (double r : s.rho) mass += r;
    const auto en = energies(s, cfg.potential);
    res.monitors.push_back({s.t, mass * s.cell_area(), en.E, en.F, *lo, *hi, lambda});
    if (*lo < -band || *hi > 1.0 + band) ++res.band_violations;
    if (!(*lo >= -0.5 && *hi <= 1.5)) {
      std::ostringstream os;
      os << "pde2d: rho left [-0.5, 1.5] at t = " << s.t;
      throw NumericalError(os.str());
    }
  };
  auto contour = [&]() {
    auto c = extract_contour(s);
    for (const auto& p : c.points)
      if (p[0] < dx || p[1] < dx || p[0] > lx - dx || p[1] > ly - dx) {
        std::ostringstream os;
        os << "pde2d: contour touches the boundary at t = " << s.t;
        throw NumericalError(os.str());
      }
    res.contours.emplace_back(s.t, std::move(c));
  };

  monitor(lagrange_multiplier(s, cfg.potential));
  if (contour_stride > 0) contour();
  if (snapshot_stride > 0) res.snapshots.push_back(s);

  std::vector<double> gx, gy;
  const double inv_eps2 = 1.0 / (eps * eps);
  std::size_t step = 0;
  while (steps_left > 0) {
    double pmax = 0.0;
    for (std::size_t k = 0; k < s.rho.size(); ++k) pmax = std::max(pmax, std::hypot(s.Px[k], s.Py[k]));
    const double courant = pmax * dt / dx;
    if (courant > 0.5) {
      if (res.dt_refined) {
        std::ostringstream os;
        os << "pde2d: CFL violation at t = " << s.t << " (max|P| dt/dx = " << courant << ")";
        throw NumericalError(os.str());
      }
      const auto factor = static_cast<std::size_t>(std::ceil(courant / 0.45));
      dt /= static_cast<double>(factor);
      steps_left *= factor;
      if (contour_stride > 0) contour_stride *= factor;
      if (snapshot_stride > 0) snapshot_stride *= factor;
      std::tie(rho_adi, p_adi) = build(dt);
      res.dt_refined = true;
    }

    gradient(s, gx, gy);
    double sum = 0.0;
    for (std::size_t k = 0; k < s.rho.size(); ++k) {
      const double r = -cfg.potential.dW(s.rho[k]) * inv_eps2 - (s.Px[k] * gx[k] + s.Py[k] * gy[k]);
      s.rho[k] += dt * r;
      sum += r;
    }
    const double lambda = -sum / static_cast<double>(s.rho.size());
    for (double& r : s.rho) r += dt * lambda;

    const double decay = std::exp(-dt / eps);
    const double gain = -cfg.beta * eps * (1.0 - decay);
    for (std::size_t k = 0; k < s.rho.size(); ++k) {
      s.Px[k] = decay * s.Px[k] + gain * gx[k];
      s.Py[k] = decay * s.Py[k] + gain * gy[k];
    }
    rho_adi.solve(s.rho);
    p_adi.solve(s.Px);
    p_adi.solve(s.Py);

    ++step;
    --steps_left;
    s.t = cfg.t_end - static_cast<double>(steps_left) * dt;
    monitor(lambda);
    if (contour_stride > 0 && (step % contour_stride == 0 || steps_left == 0)) contour();
    if (snapshot_stride > 0 && (step % snapshot_stride == 0 || steps_left == 0)) res.snapshots.push_back(s);
  }
  res.dt = dt;
  res.steps = step;
  res.final_state = std::move(s);
  return res;
}

}  // namespace motility
