#include "motility/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace motility {

KernelSolution solve_psi0(double V, double beta, const StandingWaveProfile& profile,
                          double velocity_cap) {
  if (!std::isfinite(V) || std::abs(V) > velocity_cap) {
    std::ostringstream os;
    os << "solve_psi0: |V| = " << std::abs(V) << " exceeds the velocity cap " << velocity_cap;
    throw std::invalid_argument(os.str());
  }
  if (!(beta >= 0.0)) throw std::invalid_argument("solve_psi0: beta must be >= 0");

  const std::size_t n = profile.grid.n;
  const double h = profile.grid.step();
  KernelSolution sol{V, beta, profile.grid, std::vector<double>(n, 0.0), 0.0};
  if (beta == 0.0) return sol;

  const std::size_t m = n - 2;
  std::vector<double> lower(m, -1.0 / (h * h) + V / (2.0 * h));
  std::vector<double> diag(m, 2.0 / (h * h) + 1.0);
  std::vector<double> upper(m, -1.0 / (h * h) - V / (2.0 * h));
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = -beta * profile.dtheta0[i + 1];
  TridiagonalLU(lower, diag, upper).solve_in_place(rhs);
  std::copy(rhs.begin(), rhs.end(), sol.psi0.begin() + 1);

  const auto w = profile.mass_weights();
  double phi = 0.0;
  for (std::size_t i = 0; i < n; ++i) phi += w[i] * sol.psi0[i];
  sol.phi = phi;
  return sol;
}

double kernel_residual(const KernelSolution& sol, const StandingWaveProfile& profile) {
  const double h = profile.grid.step();
  const auto& p = sol.psi0;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double d2 = (p[i + 1] - 2 * p[i] + p[i - 1]) / (h * h);
    const double d1 = (p[i + 1] - p[i - 1]) / (2 * h);
    worst = std::max(worst, std::abs(-d2 - sol.V * d1 + p[i] + sol.beta * profile.dtheta0[i]));
  }
  return worst;
}

PhiCache& PhiCache::global() {
  static PhiCache cache;
  return cache;
}

std::optional<double> PhiCache::find(std::uint64_t profile_signature, double V) const {
  std::shared_lock lock(mutex_);
  auto it = table_.find(Key{profile_signature, std::bit_cast<std::uint64_t>(V)});
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

void PhiCache::insert(std::uint64_t profile_signature, double V, double phi_unit) {
  std::unique_lock lock(mutex_);
  if (table_.size() > 4'000'000) table_.clear();
  table_.emplace(Key{profile_signature, std::bit_cast<std::uint64_t>(V)}, phi_unit);
}

std::size_t PhiCache::size() const {
  std::shared_lock lock(mutex_);
  return table_.size();
}

void PhiCache::clear() {
  std::unique_lock lock(mutex_);
  table_.clear();
}

double phi_beta(double V, double beta, const StandingWaveProfile& profile) {
  if (!(beta >= 0.0)) throw std::invalid_argument("phi_beta: beta must be >= 0");
  if (beta == 0.0) return 0.0;
  auto& cache = PhiCache::global();
  if (auto hit = cache.find(profile.signature, V)) return beta * *hit;
  const double unit = solve_psi0(V, 1.0, profile).phi;
  cache.insert(profile.signature, V, unit);
  return beta * unit;
}

double phi_beta_prime(double V, double beta, const StandingWaveProfile& profile) {
  if (beta == 0.0) return 0.0;
  const double h = 1e-4 * (1.0 + std::abs(V));
  auto central = [&](double step) {
    return (phi_beta(V + step, beta, profile) - phi_beta(V - step, beta, profile)) / (2.0 * step);
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

double reduced_velocity(std::span<const double> U, double F, const StandingWaveProfile& profile) {
  const auto w = profile.mass_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < U.size(); ++i) s += w[i] * U[i];
  return (s - F) / profile.c0;
}

RelaxResult relax_reduced(const std::function<double(double)>& forcing, double beta,
                          const StandingWaveProfile& profile, std::vector<double> U_init,
                          const RelaxOptions& options) {
  const std::size_t n = profile.grid.n;
  if (U_init.size() != n) throw std::invalid_argument("relax_reduced: U_init not on the profile grid");
  const double h = profile.grid.step();
  const double dt_max = 0.25 * h * h;
  const double dt = options.dt > 0.0 ? options.dt : dt_max;
  if (dt > dt_max * (1.0 + 1e-12))
    throw std::invalid_argument("relax_reduced: dt must not exceed 0.25 dz^2");

  const std::size_t m = n - 2;
  const double r = dt / (h * h);
  std::vector<double> lower(m, -r), diag(m, 1.0 + 2.0 * r + dt), upper(m, -r);
  const TridiagonalLU implicit(lower, diag, upper);
  const auto w = profile.mass_weights();

  RelaxResult out;
  out.U = std::move(U_init);
  out.U.front() = 0.0;
  out.U.back() = 0.0;
  std::vector<double> rhs(m);
  double t = 0.0;
  std::size_t step = 0;
  auto velocity = [&](double time) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * out.U[i];
    return (s - forcing(time)) / profile.c0;
  };

  while (t < options.t_end) {
    const double V = velocity(t);
    if (step % options.record_every == 0) {
      out.t.push_back(t);
      out.V.push_back(V);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + 1;
      const double adv = V * (out.U[j + 1] - out.U[j - 1]) / (2.0 * h);
      rhs[i] = out.U[j] + dt * (adv - beta * profile.dtheta0[j]);
    }
    implicit.solve_in_place(rhs);
    double change = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      change = std::max(change, std::abs(rhs[i] - out.U[i + 1]));
      norm = std::max(norm, std::abs(rhs[i]));
      out.U[i + 1] = rhs[i];
    }
    t += dt;
    ++step;
    if (!(norm <= options.blowup)) throw NumericalError("relax_reduced: blow-up, |U| exceeded the guard");
    if (change / dt < options.stop_rate) {
      out.converged = true;
      break;
    }
  }
  out.t_final = t;
  out.t.push_back(t);
  out.V.push_back(velocity(t));
  return out;
}

}  // namespace motility
