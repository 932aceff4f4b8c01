#include "motility/pde1d.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "motility/kernel.hpp"

namespace motility {

namespace {

constexpr double kCourantLimit = 0.5;
constexpr double kHardLow = -0.5;
constexpr double kHardHigh = 1.5;

// One semi-implicit step of the rho/P system on a node-centred window.
class Stepper1D {
 public:
  Stepper1D(const Potential& potential, double eps, double beta, std::size_t nodes, double dx, double dt)
      : potential_(potential), eps_(eps), beta_(beta), n_(nodes), dx_(dx) {
    weights_ = trapezoid_weights(n_, dx_);
    for (double w : weights_) weight_sum_ += w;
    set_dt(dt);
  }

  double dt() const { return dt_; }

  void set_dt(double dt) {
    dt_ = dt;
    const double r = dt_ / (dx_ * dx_);
    std::vector<double> lo(n_, -r), di(n_, 1.0 + 2.0 * r), up(n_, -r);
    up[0] = -2.0 * r;  // mirror ghost: zero flux
    lo[n_ - 1] = -2.0 * r;
    rho_solver_ = TridiagonalLU(lo, di, up);
    const double rp = eps_ * r;
    const std::size_t m = n_ - 2;
    std::vector<double> plo(m, -rp), pdi(m, 1.0 + 2.0 * rp), pup(m, -rp);
    p_solver_ = TridiagonalLU(plo, pdi, pup);
  }

  double courant(const std::vector<double>& P) const {
    double m = 0.0;
    for (double p : P) m = std::max(m, std::abs(p));
    return m * dt_ / dx_;
  }

  /// Advances in place; returns the multiplier used (0 unless `conserve`).
  double step(std::vector<double>& rho, std::vector<double>& P, double F, bool conserve) {
    grad_.assign(n_, 0.0);
    for (std::size_t i = 1; i + 1 < n_; ++i) grad_[i] = (rho[i + 1] - rho[i - 1]) / (2.0 * dx_);
    reaction_.resize(n_);
    const double inv_eps2 = 1.0 / (eps_ * eps_);
    for (std::size_t i = 0; i < n_; ++i) reaction_[i] = -potential_.dW(rho[i]) * inv_eps2 - P[i] * grad_[i];
    double lambda = 0.0;
    if (conserve) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) s += weights_[i] * reaction_[i];
      lambda = -s / weight_sum_;
    }
    const double source = F / eps_ + lambda;
    for (std::size_t i = 0; i < n_; ++i) rho[i] += dt_ * (reaction_[i] + source);

    prhs_.resize(n_ - 2);
    for (std::size_t i = 1; i + 1 < n_; ++i) prhs_[i - 1] = P[i] + dt_ * (-P[i] / eps_ - beta_ * grad_[i]);

    rho_solver_.solve_in_place(rho);
    p_solver_.solve_in_place(prhs_);
    std::copy(prhs_.begin(), prhs_.end(), P.begin() + 1);
    P.front() = 0.0;
    P.back() = 0.0;
    return lambda;
  }

  double mass(const std::vector<double>& rho) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += weights_[i] * rho[i];
    return s;
  }

 private:
  const Potential& potential_;
  double eps_;
  double beta_;
  std::size_t n_;
  double dx_;
  double dt_ = 0.0;
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
  TridiagonalLU rho_solver_;
  TridiagonalLU p_solver_;
  std::vector<double> grad_, reaction_, prhs_;
};

// Whole-cell shift of the window by k cells (k > 0 moves it right).
void shift_window(FieldState1D& s, long k) {
  if (k == 0) return;
  const auto n = static_cast<long>(s.rho.size());
  std::vector<double> rho(s.rho.size()), P(s.P.size());
  for (long i = 0; i < n; ++i) {
    const long j = std::clamp(i + k, 0L, n - 1);
    rho[static_cast<std::size_t>(i)] = s.rho[static_cast<std::size_t>(j)];
    P[static_cast<std::size_t>(i)] = (i + k >= 0 && i + k < n) ? s.P[static_cast<std::size_t>(i + k)] : 0.0;
  }
  s.rho = std::move(rho);
  s.P = std::move(P);
  s.offset += static_cast<double>(k) * s.grid.step();
}

struct Crossing {
  std::size_t i;  // rho[i] and rho[i+1] straddle 1/2
};

std::vector<Crossing> crossings(const std::vector<double>& rho) {
  std::vector<Crossing> out;
  for (std::size_t i = 0; i + 1 < rho.size(); ++i)
    if ((rho[i] >= 0.5) != (rho[i + 1] >= 0.5)) out.push_back({i});
  return out;
}

// Position (window coordinates) of the crossing in cell i.
double refine_crossing(const FieldState1D& s, std::size_t i) {
  const auto& r = s.rho;
  const double dx = s.grid.step();
  double sgl = (0.5 - r[i]) / (r[i + 1] - r[i]);
  if (i >= 1 && i + 2 < r.size()) {
    const double fm = r[i - 1] - 0.5, f0 = r[i] - 0.5, f1 = r[i + 1] - 0.5, f2 = r[i + 2] - 0.5;
    const double a1 = -fm / 3.0 - f0 / 2.0 + f1 - f2 / 6.0;
    const double a2 = fm / 2.0 - f0 + f1 / 2.0;
    const double a3 = -fm / 6.0 + f0 / 2.0 - f1 / 2.0 + f2 / 6.0;
    const double p = f0 + sgl * (a1 + sgl * (a2 + sgl * a3));
    const double dp = a1 + sgl * (2.0 * a2 + 3.0 * sgl * a3);
    if (dp != 0.0) {
      const double next = sgl - p / dp;
      if (next >= 0.0 && next <= 1.0) sgl = next;
    }
  }
  return s.grid.at(i) + sgl * dx;
}

bool outside_band(const std::vector<double>& rho, double eps) {
  const double band = std::pow(eps, 0.25) + 1e-3;
  for (double r : rho)
    if (r < -band || r > 1.0 + band) return true;
  return false;
}

void hard_bounds(const std::vector<double>& rho, double t) {
  for (double r : rho) {
    if (!(r >= kHardLow && r <= kHardHigh)) {
      std::ostringstream os;
      os << "rho left [-0.5, 1.5] at t = " << t << " (value " << r << ")";
      throw NumericalError(os.str());
    }
  }
}

UniformGrid window_grid(double eps, int cells_per_eps, double half_length) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (cells_per_eps < 8) throw std::invalid_argument("cells_per_eps must be >= 8 (dx <= eps/8)");
  if (!(half_length > 0.0)) throw std::invalid_argument("half_length must be > 0");
  const double target = eps / cells_per_eps;
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * half_length / target - 1e-9));
  return UniformGrid{-half_length, half_length, cells + 1};
}

Snapshot1D snapshot(const FieldState1D& s) {
  Snapshot1D snap;
  snap.t = s.t;
  snap.x.resize(s.rho.size());
  for (std::size_t i = 0; i < s.rho.size(); ++i) snap.x[i] = s.x_at(i);
  snap.rho = s.rho;
  snap.P = s.P;
  return snap;
}

// Courant guard: one refinement by an integer factor, then failure.
void courant_guard(Stepper1D& stepper, const std::vector<double>& P, bool& refined, std::size_t& steps_left,
                   std::size_t& stride, double t) {
  const double c = stepper.courant(P);
  if (c <= kCourantLimit) return;
  if (refined) {
    std::ostringstream os;
    os << "CFL violation at t = " << t << ": max|P| dt/dx = " << c << " after one refinement";
    throw NumericalError(os.str());
  }
  const auto factor = static_cast<std::size_t>(std::ceil(c / (0.9 * kCourantLimit)));
  stepper.set_dt(stepper.dt() / static_cast<double>(factor));
  steps_left *= factor;
  stride *= factor;
  refined = true;
}

}  // namespace

double pde1d_time_step(double eps, double dx) { return std::min(0.2 * eps * eps, 0.25 * dx * dx / eps); }

double track_interface(const FieldState1D& state) {
  const auto c = crossings(state.rho);
  if (c.size() != 1) {
    std::ostringstream os;
    os << "track_interface: expected one rho = 1/2 crossing, found " << c.size();
    throw NumericalError(os.str());
  }
  return state.offset + refine_crossing(state, c.front().i);
}

double well_shift(const Potential& potential, double well, double eps_F) {
  double d = eps_F / potential.d2W(well);
  for (int it = 0; it < 50; ++it) {
    const double step = (potential.dW(well + d) - eps_F) / potential.d2W(well + d);
    d -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(d))) break;
  }
  if (!std::isfinite(d) || std::abs(d) > 0.25)
    throw NumericalError("well_shift: no small solution of W'(well + d) = eps F");
  return d;
}

ResidualDecomposition decompose_residual(const FieldState1D& state, double x_interface, double F,
                                         const StandingWaveProfile& profile) {
  const double eps = state.eps;
  const double d_minus = well_shift(profile.potential, 0.0, eps * F);
  const double d_plus = well_shift(profile.potential, 1.0, eps * F);
  ResidualDecomposition r;
  r.t = state.t;
  std::vector<double> th_prime;
  for (std::size_t i = 0; i < state.rho.size(); ++i) {
    const double y = (state.x_at(i) - x_interface) / eps;
    if (y < profile.grid.lo || y > profile.grid.hi) continue;
    const double th = profile.theta_at(y);
    const double eps_psi = d_minus + th * (d_plus - d_minus);
    r.y.push_back(y);
    r.u.push_back((state.rho[i] - th - eps_psi) / eps);
    th_prime.push_back(profile.dtheta_at(y));
  }
  if (r.y.size() < 3) throw NumericalError("decompose_residual: window does not cover the interface layer");
  const double dy = state.grid.step() / eps;
  const auto w = trapezoid_weights(r.y.size(), dy);
  double uu = 0.0, tt = 0.0;
  for (std::size_t i = 0; i < r.y.size(); ++i) {
    uu += w[i] * r.u[i] * th_prime[i];
    tt += w[i] * th_prime[i] * th_prime[i];
  }
  const double coef = uu / tt;
  double norm2 = 0.0, ortho = 0.0;
  for (std::size_t i = 0; i < r.y.size(); ++i) {
    r.u[i] -= coef * th_prime[i];
    norm2 += w[i] * r.u[i] * r.u[i];
    ortho += w[i] * r.u[i] * th_prime[i];
  }
  r.u_norm_L2 = std::sqrt(norm2);
  r.orthogonality = ortho;
  return r;
}

std::vector<double> smoothed_velocity(const std::vector<double>& t, const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> raw(n, 0.0), out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    raw[i] = (x[b] - x[a]) / (t[b] - t[a]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= 2 ? i - 2 : 0;
    const std::size_t b = std::min(n - 1, i + 2);
    double s = 0.0;
    for (std::size_t j = a; j <= b; ++j) s += raw[j];
    out[i] = s / static_cast<double>(b - a + 1);
  }
  return out;
}

std::vector<PdeJump> detect_jumps(const InterfaceTrack& track, double slope_limit, std::size_t merge,
                                  double settle) {
  std::vector<PdeJump> jumps;
  const auto& V = track.V_est;
  const auto& F = track.F;
  if (V.size() < 2) return jumps;
  // reference forcing change per sample; local dF vanishes at turning points of the schedule
  double rate = 0.0;
  for (std::size_t i = 0; i + 1 < F.size(); ++i) rate += std::abs(F[i + 1] - F[i]);
  rate /= static_cast<double>(F.size() - 1);
  const double limit = std::max(slope_limit * rate, 1e-9);
  std::optional<std::size_t> run_start;
  std::size_t run_end = 0;
  auto close_run = [&]() {
    if (!run_start) return;
    const std::size_t a = *run_start;
    const std::size_t b = std::min(run_end + 1, V.size() - 1);
    std::size_t steep = a;
    for (std::size_t i = a; i < b; ++i)
      if (std::abs(V[i + 1] - V[i]) > std::abs(V[steep + 1] - V[steep])) steep = i;
    jumps.push_back({steep, track.t[steep], F[steep], V[a], V[b]});
    run_start.reset();
  };
  for (std::size_t i = 0; i + 1 < V.size(); ++i) {
    if (track.t[i] < track.t.front() + settle) continue;
    if (!(std::abs(V[i + 1] - V[i]) > limit)) continue;
    if (run_start && i > run_end + merge) close_run();
    if (!run_start) run_start = i;
    run_end = i;
  }
  close_run();
  return jumps;
}

Pde1dResult simulate_1d(const Pde1dConfig& cfg) {
  if (!(cfg.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(cfg.t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  const auto profile = standing_wave(cfg.potential);
  const double eps = cfg.eps;

  FieldState1D s;
  s.grid = window_grid(eps, cfg.cells_per_eps, cfg.half_length);
  s.eps = eps;
  s.offset = cfg.initial_position;
  const std::size_t n = s.grid.n;
  const double dx = s.grid.step();
  s.rho.resize(n);
  s.P.assign(n, 0.0);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    s.rho[i] = profile.theta_at(s.grid.at(i) / eps);
    if (cfg.perturbation != 0.0) s.rho[i] += eps * cfg.perturbation * normal(rng);
  }
  if (cfg.initial_velocity && cfg.beta > 0.0) {
    const auto kernel = solve_psi0(*cfg.initial_velocity, cfg.beta, profile);
    for (std::size_t i = 1; i + 1 < n; ++i)
      s.P[i] = interpolate_linear(profile.grid, kernel.psi0, s.grid.at(i) / eps);
  }

  Pde1dResult res;
  double dt = pde1d_time_step(eps, dx);
  std::size_t steps_left = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
  dt = cfg.t_end / static_cast<double>(steps_left);
  const double sample = cfg.sample_interval > 0.0 ? cfg.sample_interval : cfg.t_end / 1000.0;
  std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample / dt)));
  Stepper1D stepper(cfg.potential, eps, cfg.beta, n, dx, dt);

  std::size_t step = 0;
  std::size_t samples = 0;
  const double margin = 5.0 * eps;
  auto record = [&]() {
    const double F = cfg.forcing(s.t);
    const double x = track_interface(s);
    const double local = x - s.offset;
    if (local < s.grid.lo + margin || local > s.grid.hi - margin) {
      std::ostringstream os;
      os << "interface within 5 eps of the domain end at t = " << s.t << " (x = " << x << ")";
      throw NumericalError(os.str());
    }
    res.track.t.push_back(s.t);
    res.track.x.push_back(x);
    res.track.F.push_back(F);
    if (outside_band(s.rho, eps)) ++res.bound_violations;
    if (cfg.snapshot_stride > 0 && samples % cfg.snapshot_stride == 0) res.snapshots.push_back(snapshot(s));
    if (cfg.residuals) res.residuals.push_back(decompose_residual(s, x, F, profile));
    ++samples;
  };

  record();
  while (steps_left > 0) {
    courant_guard(stepper, s.P, res.dt_refined, steps_left, stride, s.t);
    stepper.step(s.rho, s.P, cfg.forcing(s.t), false);
    ++step;
    --steps_left;
    s.t = cfg.t_end - static_cast<double>(steps_left) * stepper.dt();
    hard_bounds(s.rho, s.t);
    if (cfg.recenter) {
      const auto c = crossings(s.rho);
      if (c.size() == 1) {
        const double local = refine_crossing(s, c.front().i);
        if (std::abs(local) > eps) shift_window(s, std::lround(local / dx));
      }
    }
    if (step % stride == 0 || steps_left == 0) record();
  }
  res.track.V_est = smoothed_velocity(res.track.t, res.track.x);
  res.dt = stepper.dt();
  res.steps = step;
  res.final_state = std::move(s);
  return res;
}

CellResult simulate_two_interface_cell(const CellConfig& cfg) {
  if (!(cfg.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  const double eps = cfg.eps;
  const double a = cfg.half_width > 0.0 ? cfg.half_width : 20.0 * eps;
  const double L = cfg.half_length > 0.0 ? cfg.half_length : 4.0 * a;
  if (a < 20.0 * eps * (1.0 - 1e-12)) throw std::invalid_argument("cell half_width must be >= 20 eps");
  if (L < 3.0 * a * (1.0 - 1e-12)) throw std::invalid_argument("cell half_length must be >= 3 half_width");
  const auto profile = standing_wave(cfg.potential);

  FieldState1D s;
  s.grid = window_grid(eps, cfg.cells_per_eps, L);
  s.eps = eps;
  const std::size_t n = s.grid.n;
  const double dx = s.grid.step();
  s.rho.resize(n);
  s.P.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s.grid.at(i);
    s.rho[i] = profile.theta_at((x + a) / eps) * profile.theta_at((a - x) / eps);
  }

  CellResult res;
  double dt = pde1d_time_step(eps, dx);
  std::size_t steps_left = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
  dt = cfg.t_end / static_cast<double>(steps_left);
  const double sample = cfg.sample_interval > 0.0 ? cfg.sample_interval : cfg.t_end / 1000.0;
  std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample / dt)));
  Stepper1D stepper(cfg.potential, eps, cfg.beta, n, dx, dt);
  const double mass0 = stepper.mass(s.rho);

  auto interfaces = [&](double t) {
    const auto c = crossings(s.rho);
    if (c.size() != 2) {
      std::ostringstream os;
      os << "cell: expected two interfaces at t = " << t << ", found " << c.size();
      throw NumericalError(os.str());
    }
    const double left = refine_crossing(s, c[0].i);
    const double right = refine_crossing(s, c[1].i);
    if (right - left < 10.0 * eps) {
      std::ostringstream os;
      os << "cell: interfaces merged (width " << right - left << " < 10 eps) at t = " << t;
      throw NumericalError(os.str());
    }
    if (left < s.grid.lo + 5.0 * eps || right > s.grid.hi - 5.0 * eps) {
      std::ostringstream os;
      os << "cell: interface reached the domain end at t = " << t;
      throw NumericalError(os.str());
    }
    return std::pair{left, right};
  };

  std::size_t samples = 0;
  double lambda = 0.0;
  auto record = [&]() {
    const auto [left, right] = interfaces(s.t);
    res.samples.push_back({s.t, s.offset + left, s.offset + right, stepper.mass(s.rho), lambda});
    if (outside_band(s.rho, eps)) ++res.bound_violations;
    if (cfg.snapshot_stride > 0 && samples % cfg.snapshot_stride == 0) res.snapshots.push_back(snapshot(s));
    ++samples;
  };

  record();
  std::size_t step = 0;
  while (steps_left > 0) {
    courant_guard(stepper, s.P, res.dt_refined, steps_left, stride, s.t);
    lambda = stepper.step(s.rho, s.P, 0.0, true);
    ++step;
    --steps_left;
    s.t = cfg.t_end - static_cast<double>(steps_left) * stepper.dt();
    hard_bounds(s.rho, s.t);
    if (cfg.recenter) {
      const auto [left, right] = interfaces(s.t);
      const double mid = 0.5 * (left + right);
      if (std::abs(mid) > eps) shift_window(s, std::lround(mid / dx));
    }
    if (step % stride == 0 || steps_left == 0) record();
  }

  // least-squares slope of the midpoint over the final quarter
  const std::size_t first = res.samples.size() * 3 / 4;
  double st = 0, sx = 0, stt = 0, stx = 0;
  std::size_t cnt = 0;
  for (std::size_t i = first; i < res.samples.size(); ++i) {
    const double t = res.samples[i].t;
    const double x = 0.5 * (res.samples[i].x_back + res.samples[i].x_front);
    st += t;
    sx += x;
    stt += t * t;
    stx += t * x;
    ++cnt;
  }
  const double denom = static_cast<double>(cnt) * stt - st * st;
  res.velocity = (cnt >= 2 && denom != 0.0) ? (static_cast<double>(cnt) * stx - st * sx) / denom : 0.0;
  const auto& f = res.samples.front();
  const auto& l = res.samples.back();
  res.width_drift = (l.x_front - l.x_back) - (f.x_front - f.x_back);
  res.mass_drift = std::abs(stepper.mass(s.rho) - mass0) / mass0;
  res.dt = stepper.dt();
  res.final_state = std::move(s);
  return res;
}

}  // namespace motility
