#pragma once

// Level-set extraction on cell-centred grids and planar polygon helpers.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace motility {

using Point2 = std::array<double, 2>;

struct Polyline {
  std::vector<Point2> points;
  bool closed = false;
};

/// Marching squares over samples f[j * nx + i] located at
/// (x0 + i dx, y0 + j dy); saddles resolved by the cell-centre average.
std::vector<Polyline> trace_level_set(std::span<const double> f, std::size_t nx, std::size_t ny,
                                      double x0, double y0, double dx, double dy, double level);

struct Contour {
  std::vector<Point2> points;  // closed, counterclockwise, last point not repeated
  double enclosed_area = 0.0;
  double perimeter = 0.0;
};

/// The single closed level curve; throws NumericalError on zero, several or open components.
Contour single_closed_contour(std::span<const double> f, std::size_t nx, std::size_t ny, double x0,
                              double y0, double dx, double dy, double level = 0.5);

/// Signed shoelace area (positive for counterclockwise).
double signed_area(std::span<const Point2> polygon);
double perimeter(std::span<const Point2> polygon);
/// No two non-adjacent edges intersect.
bool is_simple(std::span<const Point2> polygon);

}  // namespace motility
