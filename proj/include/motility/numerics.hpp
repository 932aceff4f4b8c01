#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace motility {

/// Raised when a numerical procedure cannot deliver a result
/// (non-convergence, singular systems, blow-up, CFL violations).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform 1D grid with `n` nodes including both endpoints.
struct UniformGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;

  double step() const { return (hi - lo) / static_cast<double>(n - 1); }
  double at(std::size_t i) const { return lo + step() * static_cast<double>(i); }
  std::vector<double> nodes() const;

  bool operator==(const UniformGrid&) const = default;
};

/// Thomas algorithm. Row i reads lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i];
/// lower[0] and upper[n-1] are ignored.
std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs);

/// Factor-once, solve-many tridiagonal system. Used by the implicit diffusion
/// steps where the matrix is fixed for the whole run.
class TridiagonalLU {
 public:
  TridiagonalLU() = default;
  TridiagonalLU(std::span<const double> lower, std::span<const double> diag,
                std::span<const double> upper);

  std::size_t size() const { return inv_pivot_.size(); }
  void solve_in_place(std::span<double> rhs) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_mod_;
  std::vector<double> inv_pivot_;
};

double trapezoid(std::span<const double> f, double h);
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Safeguarded secant/bisection on a bracket [a, b] with f(a), f(b) of opposite sign.
template <class F>
double polish_root(F&& f, double a, double b, double fa, double fb, double tol,
                   int max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NumericalError("polish_root: bracket has no sign change");
  for (int it = 0; it < max_iter; ++it) {
    double x = b - fb * (b - a) / (fb - fa);
    const double lo = a < b ? a : b;
    const double hi = a < b ? b : a;
    const double width = hi - lo;
    // fall back to bisection when the secant step leaves the inner part of the bracket
    if (!(x > lo + 0.05 * width && x < hi - 0.05 * width)) x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (std::abs(b - a) <= tol) return std::abs(fa) < std::abs(fb) ? a : b;
  }
  throw NumericalError("polish_root: no convergence");
}

/// FNV-1a, used for cache keys and parameter hashes.
std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const std::string& text);

/// Linear interpolation on a uniform grid, clamped to the end values.
double interpolate_linear(const UniformGrid& grid, std::span<const double> values, double x);

}  // namespace motility
