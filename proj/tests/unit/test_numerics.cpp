#include <doctest.h>

#include <cmath>
#include <random>

#include "motility/numerics.hpp"

using namespace motility;

namespace {

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[p][k])) p = i;
    std::swap(A[k], A[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

}  // namespace

TEST_CASE("tridiagonal solvers agree with dense elimination") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {1u, 2u, 5u, 40u}) {
    std::vector<double> lo(n), di(n), up(n), rhs(n);
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = u(rng);
      up[i] = u(rng);
      di[i] = 3.0 + u(rng);
      rhs[i] = u(rng);
      A[i][i] = di[i];
      if (i > 0) A[i][i - 1] = lo[i];
      if (i + 1 < n) A[i][i + 1] = up[i];
    }
    const auto ref = dense_solve(A, rhs);
    const auto x = solve_tridiagonal(lo, di, up, rhs);
    TridiagonalLU lu(lo, di, up);
    auto y = rhs;
    lu.solve_in_place(y);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-12));
      CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("tridiagonal solve rejects a zero pivot") {
  std::vector<double> lo{0, 1}, di{0, 1}, up{1, 0}, rhs{1, 1};
  CHECK_THROWS_AS(solve_tridiagonal(lo, di, up, rhs), NumericalError);
}

TEST_CASE("trapezoid is exact for linear integrands") {
  std::vector<double> f;
  for (int i = 0; i <= 10; ++i) f.push_back(2.0 + 3.0 * 0.1 * i);
  CHECK(trapezoid(f, 0.1) == doctest::Approx(2.0 + 1.5).epsilon(1e-14));
  const auto w = trapezoid_weights(11, 0.1);
  CHECK(w.front() == doctest::Approx(0.05));
  CHECK(w[5] == doctest::Approx(0.1));
}

TEST_CASE("polish_root finds a bracketed root and refuses a bad bracket") {
  auto f = [](double x) { return std::cos(x) - x; };
  const double r = polish_root(f, 0.0, 1.0, f(0.0), f(1.0), 1e-14);
  CHECK(std::abs(f(r)) < 1e-13);
  CHECK_THROWS_AS(polish_root(f, 2.0, 3.0, f(2.0), f(3.0), 1e-12), NumericalError);
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a(std::string("")) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a(std::string("a")) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a(std::string("foobar")) == 0x85944171f73967e8ULL);
}

TEST_CASE("linear interpolation clamps at the ends") {
  UniformGrid g{0.0, 1.0, 3};
  std::vector<double> v{0.0, 2.0, 6.0};
  CHECK(interpolate_linear(g, v, 0.25) == doctest::Approx(1.0));
  CHECK(interpolate_linear(g, v, 0.75) == doctest::Approx(4.0));
  CHECK(interpolate_linear(g, v, -1.0) == 0.0);
  CHECK(interpolate_linear(g, v, 9.0) == 6.0);
}
