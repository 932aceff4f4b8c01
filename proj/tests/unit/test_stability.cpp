#include <doctest.h>

#include <cmath>
#include <numbers>

#include "motility/sil1d.hpp"
#include "motility/stability.hpp"

using namespace motility;

namespace {

const StandingWaveProfile& coarse() {
  static const auto p = standing_wave(Potential::symmetric_quartic(), 20.0, 1001);
  return p;
}
const StandingWaveProfile& standard() {
  static const auto p = stability_profile(Potential::symmetric_quartic());
  return p;
}

// Plain Thomas sweep, kept separate from the library solver.
std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                           std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

}  // namespace

// Advection makes T non-normal with eigenvector growth ~ e^{|V| L}; beyond |V| ~ 1 dgeev
// returns pseudospectral values, so the closed form is checked on small |V| only.
TEST_CASE("beta = 0: spectrum is the tridiagonal Toeplitz closed form") {
  const auto& p = coarse();
  const double h = p.grid.step();
  const std::size_t m = p.grid.n - 2;
  for (double V : {0.0, 1.0, -0.5}) {
    const auto rep = is_stable(V, 0.0, p);
    const double a = 1.0 / (h * h) - V / (2.0 * h), c = 1.0 / (h * h) + V / (2.0 * h);
    const double top = -2.0 / (h * h) - 1.0 + 2.0 * std::sqrt(a * c) * std::cos(std::numbers::pi / (m + 1.0));
    CHECK(rep.max_real == doctest::Approx(top).epsilon(1e-9));
    CHECK(rep.stable);
    // only the symmetric case is well conditioned through the whole spectrum
    if (V == 0.0) {
      for (const auto& ev : rep.eigenvalues) CHECK(std::abs(ev.imag()) < 1e-8);
      const double bottom = -4.0 / (h * h) - 1.0 + 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi / (m + 1.0)));
      CHECK(rep.eigenvalues.back().real() == doctest::Approx(bottom).epsilon(1e-9));
    }
  }
}

TEST_CASE("rightmost eigenvalue solves the rank-one secular equation") {
  // A = T + u w^T with T tridiagonal: an eigenvalue lambda outside the spectrum of T
  // satisfies 1 + w^T (T - lambda)^{-1} u = 0. Between the folds it is positive.
  const auto& p = coarse();
  const double h = p.grid.step();
  const std::size_t m = p.grid.n - 2;
  for (double V : {1.0, 2.0, 4.0}) {
    const double beta = 150.0;
    const auto rep = is_stable(V, beta, p);
    REQUIRE(std::abs(rep.eigenvalues.front().imag()) < 1e-12);
    const double lambda = rep.max_real;
    REQUIRE(lambda > 0.0);
    const auto k = solve_psi0(V, beta, p);
    const auto w = p.mass_weights();
    std::vector<double> lo(m, 1.0 / (h * h) - V / (2.0 * h)), up(m, 1.0 / (h * h) + V / (2.0 * h));
    std::vector<double> di(m, -2.0 / (h * h) - 1.0 - lambda), u(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = (k.psi0[i + 2] - k.psi0[i]) / (2.0 * h) / p.c0;
    const auto x = thomas(lo, di, up, u);
    double s = 1.0;
    for (std::size_t j = 0; j < m; ++j) s += w[j + 1] * x[j];
    CHECK(std::abs(s) < 1e-6);
  }
}

TEST_CASE("spectral stability agrees with c0 > Phi' away from folds") {
  const auto& p = standard();
  for (double V : {-3.0, -1.0, 0.0, 0.2, 1.0, 3.0, 5.0, 8.0}) {
    const bool monotone = p.c0 > phi_beta_prime(V, 150.0, p);
    CHECK_MESSAGE(is_stable(V, 150.0, p).stable == monotone, "V = " << V);
  }
}

TEST_CASE("an eigenvalue crosses zero at a fold") {
  const auto& p = standard();
  const auto folds = fold_points(150.0, p);
  REQUIRE(folds.size() == 2);
  for (const auto& f : folds) {
    const double left = is_stable(f.V - 0.05, 150.0, p).max_real;
    const double right = is_stable(f.V + 0.05, 150.0, p).max_real;
    CHECK(left * right < 0.0);
    CHECK(std::abs(is_stable(f.V, 150.0, p).max_real) < 0.2 * std::max(std::abs(left), std::abs(right)));
  }
}

TEST_CASE("assemble_AV refuses a kernel from another grid or velocity") {
  const auto k = solve_psi0(0.5, 10.0, coarse());
  CHECK_THROWS_AS(assemble_AV(0.5, 10.0, standard(), k), std::invalid_argument);
  CHECK_THROWS_AS(assemble_AV(0.6, 10.0, coarse(), k), std::invalid_argument);
  CHECK_THROWS_AS(assemble_AV(0.5, 11.0, coarse(), k), std::invalid_argument);
  CHECK(assemble_AV(0.5, 10.0, coarse(), k).n == coarse().grid.n - 2);
}
