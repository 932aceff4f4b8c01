#include <doctest.h>

#include <cmath>
#include <numbers>

#include "motility/pde2d.hpp"

using namespace motility;

namespace {

Pde2dConfig small(double beta) {
  Pde2dConfig c;
  // radius well above eps: at radius ~ 5 eps the uniform state has lower energy and the disc dissolves
  c.eps = 0.03;
  c.beta = beta;
  c.nx = c.ny = 200;
  c.length_x = c.length_y = 1.0;
  c.radius = 0.25;
  c.center_x = c.center_y = 0.5;
  c.t_end = 0.1;
  c.contour_stride = 100;
  return c;
}

}  // namespace

TEST_CASE("validation lists every problem") {
  Pde2dConfig c = small(0.0);
  c.eps = -1.0;
  c.beta = -2.0;
  c.t_end = 0.0;
  try {
    validate_pde2d(c);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    const std::string m = e.what();
    CHECK(m.find("eps must be > 0") != std::string::npos);
    CHECK(m.find("beta must be >= 0") != std::string::npos);
    CHECK(m.find("t_end must be > 0") != std::string::npos);
  }
  c = small(0.0);
  c.nx = 100;
  CHECK_THROWS_WITH_AS(validate_pde2d(c), doctest::Contains("square"), std::invalid_argument);
  c.ny = 100;
  CHECK_THROWS_WITH_AS(validate_pde2d(c), doctest::Contains("too coarse"), std::invalid_argument);
  c = small(0.0);
  c.center_x = 0.3;
  CHECK_THROWS_WITH_AS(validate_pde2d(c), doctest::Contains("5 eps"), std::invalid_argument);
  CHECK_NOTHROW(validate_pde2d(small(10.0)));
}

TEST_CASE("multiplier of a uniform state is W'(rho)/eps^2") {
  const auto W = Potential::symmetric_quartic();
  auto s = make_state_2d(16, 16, 0.01, 0.05, 0.0);
  for (double& r : s.rho) r = 0.3;
  CHECK(lagrange_multiplier(s, W) == doctest::Approx(W.dW(0.3) / (0.05 * 0.05)));
  for (double& p : s.Px) p = 2.0;  // uniform rho: no transport contribution
  CHECK(lagrange_multiplier(s, W) == doctest::Approx(W.dW(0.3) / (0.05 * 0.05)));
  const auto e = energies(s, W);
  CHECK(e.E == doctest::Approx(W.W(0.3) / 0.05 * s.domain_area()));
  CHECK(e.F == doctest::Approx((4.0 + 16.0) * s.domain_area()));
}

TEST_CASE("beta = 0: mass conserved, energy decreasing, disc keeps its area") {
  const auto r = simulate_2d(small(0.0));
  const double m0 = r.monitors.front().mass;
  double worst = 0.0;
  for (const auto& m : r.monitors) worst = std::max(worst, std::abs(m.mass - m0) / m0);
  CHECK(worst < 1e-10);
  // the centred-gradient energy is not the exact discrete Lyapunov functional of the
  // 5-point scheme; near equilibrium it wobbles at the 1e-8 level
  for (std::size_t k = 1; k < r.monitors.size(); ++k)
    CHECK(r.monitors[k].E <= r.monitors[k - 1].E * (1.0 + 1e-7));
  CHECK(r.monitors.back().E < r.monitors.front().E);
  CHECK(r.band_violations == 0);
  REQUIRE(r.contours.size() >= 3);
  CHECK(r.contours.front().second.enclosed_area == doctest::Approx(std::numbers::pi * 0.0625).epsilon(0.02));
  // after the initial layer relaxes the disc is stationary
  const auto& mid = r.contours[r.contours.size() / 2].second;
  const auto& last = r.contours.back().second;
  CHECK(std::abs(last.enclosed_area - mid.enclosed_area) < 0.01 * mid.enclosed_area);
  const double R = std::sqrt(last.enclosed_area / std::numbers::pi);
  for (const auto& p : last.points) CHECK(std::abs(std::hypot(p[0] - 0.5, p[1] - 0.5) - R) < 0.01);
}

TEST_CASE("beta > 0: mass conserved, rho stays in band, polarization energy bounded") {
  const auto r = simulate_2d(small(10.0));
  const double m0 = r.monitors.front().mass;
  for (const auto& m : r.monitors) {
    CHECK(std::abs(m.mass - m0) / m0 < 1e-10);
    CHECK(m.E + m.F <= 3.0 * (r.monitors.front().E + r.monitors.front().F + 1.0));
  }
  CHECK(r.band_violations == 0);
  CHECK(r.final_state.t == doctest::Approx(0.1));
  for (const auto& [t, c] : r.contours) CHECK(is_simple(c.points));
}
