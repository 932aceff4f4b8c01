#include "motility/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_map>

#include "motility/numerics.hpp"

namespace motility {

namespace {

// Edge ids: horizontal edge (i,j)-(i+1,j) -> 2 (j nx + i), vertical (i,j)-(i,j+1) -> 2 (j nx + i) + 1.
struct Tracer {
  std::span<const double> f;
  std::size_t nx, ny;
  double x0, y0, dx, dy, level;

  bool above(std::size_t i, std::size_t j) const { return f[j * nx + i] >= level; }
  double value(std::size_t i, std::size_t j) const { return f[j * nx + i]; }

  std::uint64_t h_edge(std::size_t i, std::size_t j) const { return 2 * (j * nx + i); }
  std::uint64_t v_edge(std::size_t i, std::size_t j) const { return 2 * (j * nx + i) + 1; }

  Point2 crossing(std::uint64_t id) const {
    const std::size_t cell = id / 2;
    const std::size_t i = cell % nx;
    const std::size_t j = cell / nx;
    const double fa = value(i, j);
    if (id % 2 == 0) {
      const double fb = value(i + 1, j);
      const double s = (level - fa) / (fb - fa);
      return {x0 + (static_cast<double>(i) + s) * dx, y0 + static_cast<double>(j) * dy};
    }
    const double fb = value(i, j + 1);
    const double s = (level - fa) / (fb - fa);
    return {x0 + static_cast<double>(i) * dx, y0 + (static_cast<double>(j) + s) * dy};
  }
};

}  // namespace

std::vector<Polyline> trace_level_set(std::span<const double> f, std::size_t nx, std::size_t ny,
                                      double x0, double y0, double dx, double dy, double level) {
  if (f.size() != nx * ny || nx < 2 || ny < 2) throw std::invalid_argument("trace_level_set: bad field size");
  const Tracer T{f, nx, ny, x0, y0, dx, dy, level};

  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> links;
  auto link = [&](std::uint64_t a, std::uint64_t b) {
    links[a].push_back(b);
    links[b].push_back(a);
  };

  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const bool c0 = T.above(i, j), c1 = T.above(i + 1, j), c2 = T.above(i + 1, j + 1), c3 = T.above(i, j + 1);
      const std::uint64_t bottom = T.h_edge(i, j), top = T.h_edge(i, j + 1);
      const std::uint64_t left = T.v_edge(i, j), right = T.v_edge(i + 1, j);
      std::vector<std::uint64_t> cut;
      if (c0 != c1) cut.push_back(bottom);
      if (c1 != c2) cut.push_back(right);
      if (c3 != c2) cut.push_back(top);
      if (c0 != c3) cut.push_back(left);
      if (cut.size() == 2) {
        link(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const double centre =
            0.25 * (T.value(i, j) + T.value(i + 1, j) + T.value(i + 1, j + 1) + T.value(i, j + 1));
        if ((centre >= level) == c0) {
          link(bottom, right);
          link(top, left);
        } else {
          link(bottom, left);
          link(right, top);
        }
      }
    }
  }

  std::vector<Polyline> out;
  std::unordered_map<std::uint64_t, bool> used;
  // every crossing has at most two neighbours
  constexpr std::uint64_t kNone = ~std::uint64_t{0};
  auto walk = [&](std::uint64_t start) {
    Polyline line;
    used[start] = true;
    line.points.push_back(T.crossing(start));
    std::uint64_t prev = kNone, cur = start;
    for (;;) {
      std::uint64_t next = kNone;
      for (auto c : links[cur])
        if (c != prev && !used[c]) next = c;
      if (next == kNone) {
        for (auto c : links[cur])
          if (c == start && c != prev && line.points.size() > 2) line.closed = true;
        break;
      }
      used[next] = true;
      line.points.push_back(T.crossing(next));
      prev = cur;
      cur = next;
    }
    return line;
  };

  // open chains start at degree-1 crossings (grid boundary); the rest are loops
  std::vector<std::uint64_t> keys;
  keys.reserve(links.size());
  for (const auto& [k, v] : links) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (auto k : keys)
    if (links[k].size() == 1 && !used[k]) out.push_back(walk(k));
  for (auto k : keys)
    if (!used[k]) out.push_back(walk(k));
  return out;
}

double signed_area(std::span<const Point2> p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * s;
}

double perimeter(std::span<const Point2> p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return s;
}

namespace {

double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

bool is_simple(std::span<const Point2> p) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % n];
    double lo_x = std::min(a[0], b[0]), hi_x = std::max(a[0], b[0]);
    double lo_y = std::min(a[1], b[1]), hi_y = std::max(a[1], b[1]);
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const auto& c = p[j];
      const auto& d = p[(j + 1) % n];
      if (std::max(c[0], d[0]) < lo_x || std::min(c[0], d[0]) > hi_x || std::max(c[1], d[1]) < lo_y ||
          std::min(c[1], d[1]) > hi_y)
        continue;
      if (segments_cross(a, b, c, d)) return false;
    }
  }
  return true;
}

Contour single_closed_contour(std::span<const double> f, std::size_t nx, std::size_t ny, double x0,
                              double y0, double dx, double dy, double level) {
  auto lines = trace_level_set(f, nx, ny, x0, y0, dx, dy, level);
  std::size_t closed = 0, open = 0;
  for (const auto& l : lines) (l.closed ? closed : open) += 1;
  if (closed != 1 || open != 0) {
    std::ostringstream os;
    os << "contour: expected one closed level curve, found " << closed << " closed and " << open << " open";
    throw NumericalError(os.str());
  }
  Contour c;
  c.points = std::move(lines.front().points);
  if (signed_area(c.points) < 0.0) std::reverse(c.points.begin(), c.points.end());
  c.enclosed_area = signed_area(c.points);
  c.perimeter = perimeter(c.points);
  return c;
}

}  // namespace motility
