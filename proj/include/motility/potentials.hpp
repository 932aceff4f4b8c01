#pragma once

// Double-well potentials with wells at 0 and 1, the heteroclinic standing
// wave connecting them, and the asymmetry indicator that controls existence
// of nonzero traveling waves.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motility/numerics.hpp"

namespace motility {

enum class PotentialKind { SymmetricQuartic, AsymmetricSextic, Polynomial };

std::string to_string(PotentialKind kind);
PotentialKind parse_potential_kind(std::string_view name);

/// Polynomial double-well potential W(rho) = sum_k c_k rho^k.
///
/// Construction validates W(0) = W(1) = 0, W''(0), W''(1) > 0 and W > 0
/// on the open interval; violations throw std::invalid_argument naming the
/// failed invariant. Builtins:
///   symmetric-quartic   W = rho^2 (1 - rho)^2 / 4
///   asymmetric-sextic   W = rho^2 (rho - 1)^2 (1 + rho^2) / 4
class Potential {
 public:
  static Potential make(PotentialKind kind, std::vector<double> coefficients = {});
  static Potential symmetric_quartic() { return make(PotentialKind::SymmetricQuartic); }
  static Potential asymmetric_sextic() { return make(PotentialKind::AsymmetricSextic); }

  PotentialKind kind() const { return kind_; }
  std::string name() const { return to_string(kind_); }
  std::span<const double> coefficients() const { return coeffs_; }

  double W(double rho) const;
  double dW(double rho) const;
  double d2W(double rho) const;

  /// Reflection rho -> 1 - rho; always returned as a Polynomial kind.
  Potential mirrored() const;

  std::uint64_t signature() const;

 private:
  Potential(PotentialKind kind, std::vector<double> coeffs);

  PotentialKind kind_;
  std::vector<double> coeffs_;
  std::vector<double> d1_;
  std::vector<double> d2_;
};

/// Sampled heteroclinic theta0'' = W'(theta0), theta0(0) = 1/2, on [-L, L].
struct StandingWaveProfile {
  Potential potential;
  UniformGrid grid;
  std::vector<double> theta0;
  std::vector<double> dtheta0;
  double c0 = 0.0;
  std::uint64_t signature = 0;

  /// Cubic Hermite evaluation between nodes; clamps to the wells outside the grid.
  double theta_at(double z) const;
  double dtheta_at(double z) const;
  /// Trapezoid weights times (theta0')^2; the quadrature used for Phi and c0.
  std::vector<double> mass_weights() const;
};

inline constexpr double kDefaultHalfWidth = 20.0;
inline constexpr std::size_t kDefaultProfilePoints = 4001;

StandingWaveProfile standing_wave(const Potential& potential, double half_width = kDefaultHalfWidth,
                                  std::size_t n_points = kDefaultProfilePoints);

/// max over interior nodes of |D2 theta0 - W'(theta0)| with second differences.
double profile_residual(const StandingWaveProfile& profile);

/// Integral over [0,1] of W''(rho) d(W^{3/2}) = W'' * (3/2) W^{1/2} W' d rho.
double asymmetry_indicator(const Potential& potential);

}  // namespace motility
