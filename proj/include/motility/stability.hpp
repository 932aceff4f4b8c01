#pragma once

// Linearization of the reduced interface equation about Psi0:
//   A_V u = u'' + V u' - u + (1/c0) Psi0' int (theta0')^2 u dz
// discretized on the interior profile nodes with zero end values.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "motility/kernel.hpp"

namespace motility {

inline constexpr std::size_t kStabilityProfilePoints = 1601;
inline constexpr double kStabilityMargin = 1e-6;

/// Column-major dense square matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i + j * n]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i + j * n]; }
};

struct SpectrumReport {
  double V = 0.0;
  double beta = 0.0;
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part, descending
  double max_real = 0.0;
  bool stable = false;
  std::uint64_t grid_signature = 0;
};

/// Profile at the default stability resolution.
StandingWaveProfile stability_profile(const Potential& potential);

DenseMatrix assemble_AV(double V, double beta, const StandingWaveProfile& profile,
                        const KernelSolution& kernel);

/// Dense eigenvalues (LAPACK dgeev). Throws NumericalError if the QR iteration fails.
std::vector<std::complex<double>> spectrum(const DenseMatrix& A);

SpectrumReport is_stable(double V, double beta, const StandingWaveProfile& profile,
                         double margin = kStabilityMargin);

}  // namespace motility
