#include "motility/stability.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>

namespace motility {

StandingWaveProfile stability_profile(const Potential& potential) {
  return standing_wave(potential, kDefaultHalfWidth, kStabilityProfilePoints);
}

DenseMatrix assemble_AV(double V, double beta, const StandingWaveProfile& profile,
                        const KernelSolution& kernel) {
  if (!(kernel.grid == profile.grid) || kernel.psi0.size() != profile.grid.n)
    throw std::invalid_argument("assemble_AV: kernel grid does not match the profile grid");
  if (kernel.V != V || kernel.beta != beta)
    throw std::invalid_argument("assemble_AV: kernel solved at a different (V, beta)");

  const std::size_t n = profile.grid.n;
  const std::size_t m = n - 2;
  const double h = profile.grid.step();
  DenseMatrix A(m);
  for (std::size_t i = 0; i < m; ++i) {
    A(i, i) = -2.0 / (h * h) - 1.0;
    if (i > 0) A(i, i - 1) = 1.0 / (h * h) - V / (2.0 * h);
    if (i + 1 < m) A(i, i + 1) = 1.0 / (h * h) + V / (2.0 * h);
  }
  if (beta == 0.0) return A;

  const auto w = profile.mass_weights();
  const auto& psi = kernel.psi0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dpsi = (psi[i + 2] - psi[i]) / (2.0 * h) / profile.c0;
    for (std::size_t j = 0; j < m; ++j) A(i, j) += dpsi * w[j + 1];
  }
  return A;
}

std::vector<std::complex<double>> spectrum(const DenseMatrix& A) {
  const auto n = static_cast<lapack_int>(A.n);
  if (n == 0) return {};
  std::vector<double> work = A.data;
  std::vector<double> wr(A.n), wi(A.n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(),
                                        wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0)
    throw NumericalError("spectrum: dgeev failed to converge (info=" + std::to_string(info) + ")");
  std::vector<std::complex<double>> ev(A.n);
  for (std::size_t i = 0; i < A.n; ++i) ev[i] = {wr[i], wi[i]};
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return ev;
}

SpectrumReport is_stable(double V, double beta, const StandingWaveProfile& profile, double margin) {
  const auto kernel = solve_psi0(V, beta, profile);
  SpectrumReport r;
  r.V = V;
  r.beta = beta;
  r.eigenvalues = spectrum(assemble_AV(V, beta, profile, kernel));
  r.max_real = r.eigenvalues.front().real();
  r.stable = r.max_real < -margin;
  r.grid_signature = profile.signature;
  return r;
}

}  // namespace motility
