#include "motility/numerics.hpp"

#include <cmath>

namespace motility {

std::vector<double> UniformGrid::nodes() const {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = at(i);
  return x;
}

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs) {
  std::vector<double> x(rhs.begin(), rhs.end());
  TridiagonalLU(lower, diag, upper).solve_in_place(x);
  return x;
}

TridiagonalLU::TridiagonalLU(std::span<const double> lower, std::span<const double> diag,
                             std::span<const double> upper) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("TridiagonalLU: band sizes differ");
  lower_.assign(lower.begin(), lower.end());
  upper_mod_.resize(n);
  inv_pivot_.resize(n);
  double prev_upper = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pivot = diag[i] - (i > 0 ? lower[i] * prev_upper : 0.0);
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw NumericalError("TridiagonalLU: zero pivot at row " + std::to_string(i));
    inv_pivot_[i] = 1.0 / pivot;
    upper_mod_[i] = (i + 1 < n) ? upper[i] * inv_pivot_[i] : 0.0;
    prev_upper = upper_mod_[i];
  }
}

void TridiagonalLU::solve_in_place(std::span<double> rhs) const {
  const std::size_t n = inv_pivot_.size();
  if (rhs.size() != n) throw std::invalid_argument("TridiagonalLU: rhs size mismatch");
  if (n == 0) return;
  rhs[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_mod_[i] * rhs[i + 1];
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n > 0) {
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
  }
  return w;
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& text) { return fnv1a(text.data(), text.size()); }

double interpolate_linear(const UniformGrid& grid, std::span<const double> values, double x) {
  if (x <= grid.lo) return values.front();
  if (x >= grid.hi) return values.back();
  const double s = (x - grid.lo) / grid.step();
  auto i = static_cast<std::size_t>(s);
  if (i >= grid.n - 1) i = grid.n - 2;
  const double f = s - static_cast<double>(i);
  return (1.0 - f) * values[i] + f * values[i + 1];
}

}  // namespace motility
