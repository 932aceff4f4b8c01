#include <doctest.h>

#include <cmath>
#include <numbers>

#include "motility/contour.hpp"
#include "motility/numerics.hpp"

using namespace motility;

namespace {

struct Field {
  std::size_t n;
  double h;
  std::vector<double> f;
};

// Smoothed indicator of the union of discs (cx, cy, r).
Field discs(std::size_t n, std::vector<std::array<double, 3>> d) {
  Field g{n, 1.0 / static_cast<double>(n - 1), std::vector<double>(n * n, 0.0)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (const auto& [cx, cy, r] : d) {
        const double dist = std::hypot(i * g.h - cx, j * g.h - cy) - r;
        v = std::max(v, 0.5 * (1.0 - std::tanh(dist / 0.02)));
      }
      g.f[j * n + i] = v;
    }
  return g;
}

bool near(const Point2& p, double x, double y) { return std::hypot(p[0] - x, p[1] - y) < 1e-12; }

}  // namespace

TEST_CASE("circle: area, perimeter and orientation") {
  const auto g = discs(201, {{0.5, 0.5, 0.3}});
  const auto c = single_closed_contour(g.f, g.n, g.n, 0.0, 0.0, g.h, g.h);
  CHECK(c.enclosed_area == doctest::Approx(std::numbers::pi * 0.09).epsilon(1e-3));
  CHECK(c.perimeter == doctest::Approx(2.0 * std::numbers::pi * 0.3).epsilon(1e-3));
  CHECK(signed_area(c.points) > 0.0);
  CHECK(is_simple(c.points));
  for (const auto& p : c.points) CHECK(std::abs(std::hypot(p[0] - 0.5, p[1] - 0.5) - 0.3) < 2e-3);
}

TEST_CASE("two components or an open curve are errors") {
  const auto two = discs(101, {{0.25, 0.5, 0.1}, {0.75, 0.5, 0.1}});
  CHECK(trace_level_set(two.f, two.n, two.n, 0.0, 0.0, two.h, two.h, 0.5).size() == 2);
  CHECK_THROWS_AS(single_closed_contour(two.f, two.n, two.n, 0.0, 0.0, two.h, two.h), NumericalError);

  std::vector<double> half(50 * 50);
  for (std::size_t j = 0; j < 50; ++j)
    for (std::size_t i = 0; i < 50; ++i) half[j * 50 + i] = i < 25 ? 1.0 : 0.0;
  const auto lines = trace_level_set(half, 50, 50, 0.0, 0.0, 1.0, 1.0, 0.5);
  REQUIRE(lines.size() == 1);
  CHECK_FALSE(lines[0].closed);
  CHECK_THROWS_AS(single_closed_contour(half, 50, 50, 0.0, 0.0, 1.0, 1.0), NumericalError);

  std::vector<double> flat(100, 0.0);
  CHECK_THROWS_AS(single_closed_contour(flat, 10, 10, 0.0, 0.0, 1.0, 1.0), NumericalError);
}

TEST_CASE("saddle cells follow the centre average") {
  // corners (0,0) = 1, (1,0) = 0, (0,1) = 0, (1,1) = 1, centre average 0.5
  const std::vector<double> f = {1.0, 0.0, 0.0, 1.0};
  SUBCASE("centre above the level joins the high corners") {
    const auto lines = trace_level_set(f, 2, 2, 0.0, 0.0, 1.0, 1.0, 0.4);
    REQUIRE(lines.size() == 2);
    for (const auto& l : lines) {
      REQUIRE(l.points.size() == 2);
      const auto& a = l.points[0];
      const auto& b = l.points[1];
      const bool lower = (near(a, 0.6, 0.0) && near(b, 1.0, 0.4)) || (near(b, 0.6, 0.0) && near(a, 1.0, 0.4));
      const bool upper = (near(a, 0.0, 0.6) && near(b, 0.4, 1.0)) || (near(b, 0.0, 0.6) && near(a, 0.4, 1.0));
      CHECK((lower || upper));
    }
  }
  SUBCASE("centre below the level isolates the high corners") {
    const auto lines = trace_level_set(f, 2, 2, 0.0, 0.0, 1.0, 1.0, 0.6);
    REQUIRE(lines.size() == 2);
    for (const auto& l : lines) {
      REQUIRE(l.points.size() == 2);
      const auto& a = l.points[0];
      const auto& b = l.points[1];
      const bool corner00 = (near(a, 0.4, 0.0) && near(b, 0.0, 0.4)) || (near(b, 0.4, 0.0) && near(a, 0.0, 0.4));
      const bool corner11 = (near(a, 1.0, 0.6) && near(b, 0.6, 1.0)) || (near(b, 1.0, 0.6) && near(a, 0.6, 1.0));
      CHECK((corner00 || corner11));
    }
  }
}

TEST_CASE("polygon helpers") {
  const std::vector<Point2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(square) == doctest::Approx(1.0));
  CHECK(perimeter(square) == doctest::Approx(4.0));
  CHECK(is_simple(square));
  const std::vector<Point2> cw(square.rbegin(), square.rend());
  CHECK(signed_area(cw) == doctest::Approx(-1.0));
  const std::vector<Point2> bowtie = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_FALSE(is_simple(bowtie));
  CHECK(signed_area(bowtie) == doctest::Approx(0.0));
}
