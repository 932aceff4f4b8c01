#pragma once

// Interface kernel: -Psi0'' - V Psi0' + Psi0 + beta theta0' = 0 on the profile
// grid, the response Phi_beta(V) = int Psi0 (theta0')^2 dz, and the reduced
// relaxation equation whose steady states select the interface velocity.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "motility/potentials.hpp"

namespace motility {

inline constexpr double kDefaultVelocityCap = 50.0;

struct KernelSolution {
  double V = 0.0;
  double beta = 0.0;
  UniformGrid grid;
  std::vector<double> psi0;
  double phi = 0.0;
};

KernelSolution solve_psi0(double V, double beta, const StandingWaveProfile& profile,
                          double velocity_cap = kDefaultVelocityCap);

/// max interior |-D2 psi - V D1 psi + psi + beta theta0'| with central differences.
double kernel_residual(const KernelSolution& sol, const StandingWaveProfile& profile);

/// Phi_beta(V); cached per (profile signature, V) as the beta = 1 response.
double phi_beta(double V, double beta, const StandingWaveProfile& profile);

/// dPhi_beta/dV by a once-Richardson-extrapolated central difference,
/// step 1e-4 (1 + |V|).
double phi_beta_prime(double V, double beta, const StandingWaveProfile& profile);

/// Concurrent-reader / single-writer cache of Phi_1(V).
class PhiCache {
 public:
  static PhiCache& global();

  std::optional<double> find(std::uint64_t profile_signature, double V) const;
  void insert(std::uint64_t profile_signature, double V, double phi_unit);
  std::size_t size() const;
  void clear();

 private:
  struct Key {
    std::uint64_t profile;
    std::uint64_t velocity_bits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return static_cast<std::size_t>(k.profile ^ (k.velocity_bits * 0x9E3779B97F4A7C15ULL));
    }
  };

  mutable std::shared_mutex mutex_;
  std::unordered_map<Key, double, KeyHash> table_;
};

/// V = (int (theta0')^2 U dy - F) / c0 for a field U sampled on the profile grid.
double reduced_velocity(std::span<const double> U, double F, const StandingWaveProfile& profile);

struct RelaxOptions {
  double t_end = 200.0;
  double dt = 0.0;  // 0 selects 0.25 dz^2
  double stop_rate = 1e-9;
  double blowup = 1e6;
  std::size_t record_every = 100;
};

struct RelaxResult {
  std::vector<double> U;
  std::vector<double> t;
  std::vector<double> V;
  bool converged = false;
  double t_final = 0.0;
};

/// dU/dt = U'' + V(U) U' - U - beta theta0', V(U) = (int (theta0')^2 U - F(t)) / c0.
/// Diffusion and decay implicit, advection explicit, U = 0 at the ends.
RelaxResult relax_reduced(const std::function<double(double)>& forcing, double beta,
                          const StandingWaveProfile& profile, std::vector<double> U_init,
                          const RelaxOptions& options = {});

}  // namespace motility
