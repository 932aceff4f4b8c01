#include "motility/potentials.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace motility {

namespace {

double horner(std::span<const double> c, double x) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

std::vector<double> derivative(std::span<const double> c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

constexpr double kWellTol = 1e-12;

void validate(std::span<const double> c, std::span<const double> d2) {
  if (c.empty()) throw std::invalid_argument("potential: empty coefficient list");
  const double w0 = horner(c, 0.0);
  const double w1 = horner(c, 1.0);
  if (std::abs(w0) > kWellTol || std::abs(w1) > kWellTol) {
    std::ostringstream os;
    os << "potential: well condition W(0)=W(1)=0 violated (W(0)=" << w0 << ", W(1)=" << w1 << ")";
    throw std::invalid_argument(os.str());
  }
  if (!(horner(d2, 0.0) > 0.0) || !(horner(d2, 1.0) > 0.0))
    throw std::invalid_argument("potential: degenerate well, need W''(0) > 0 and W''(1) > 0");
  for (int i = 1; i < 1000; ++i) {
    const double rho = i / 1000.0;
    if (!(horner(c, rho) > 0.0)) {
      std::ostringstream os;
      os << "potential: W must be positive on (0,1), fails at rho=" << rho;
      throw std::invalid_argument(os.str());
    }
  }
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::SymmetricQuartic: return "symmetric-quartic";
    case PotentialKind::AsymmetricSextic: return "asymmetric-sextic";
    case PotentialKind::Polynomial: return "polynomial";
  }
  return "unknown";
}

PotentialKind parse_potential_kind(std::string_view name) {
  if (name == "symmetric-quartic") return PotentialKind::SymmetricQuartic;
  if (name == "asymmetric-sextic") return PotentialKind::AsymmetricSextic;
  if (name == "polynomial") return PotentialKind::Polynomial;
  throw std::invalid_argument("unknown potential kind '" + std::string(name) + "'");
}

Potential::Potential(PotentialKind kind, std::vector<double> coeffs)
    : kind_(kind), coeffs_(std::move(coeffs)) {
  d1_ = derivative(coeffs_);
  d2_ = derivative(d1_);
  validate(coeffs_, d2_);
}

Potential Potential::make(PotentialKind kind, std::vector<double> coefficients) {
  switch (kind) {
    case PotentialKind::SymmetricQuartic:
      return Potential(kind, {0.0, 0.0, 0.25, -0.5, 0.25});
    case PotentialKind::AsymmetricSextic:
      // (rho^2 - 2 rho^3 + rho^4)(1 + rho^2) / 4
      return Potential(kind, {0.0, 0.0, 0.25, -0.5, 0.5, -0.5, 0.25});
    case PotentialKind::Polynomial:
      return Potential(kind, std::move(coefficients));
  }
  throw std::invalid_argument("unknown potential kind");
}

double Potential::W(double rho) const { return horner(coeffs_, rho); }
double Potential::dW(double rho) const { return horner(d1_, rho); }
double Potential::d2W(double rho) const { return horner(d2_, rho); }

Potential Potential::mirrored() const {
  std::vector<double> m(coeffs_.size(), 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      m[j] += coeffs_[k] * binomial(k, j) * sign;
    }
  }
  // W(1) = W'(1) = 0 for a valid well; the expansion leaves rounding residue there that
  // dominates W in the far tail
  if (m.size() > 0) m[0] = 0.0;
  if (m.size() > 1) m[1] = 0.0;
  return Potential(PotentialKind::Polynomial, std::move(m));
}

std::uint64_t Potential::signature() const {
  return fnv1a(coeffs_.data(), coeffs_.size() * sizeof(double));
}

double StandingWaveProfile::theta_at(double z) const {
  if (z <= grid.lo) return 0.0;
  if (z >= grid.hi) return 1.0;
  const double h = grid.step();
  auto i = static_cast<std::size_t>((z - grid.lo) / h);
  if (i >= grid.n - 1) i = grid.n - 2;
  const double s = (z - grid.at(i)) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * theta0[i] + (s3 - 2 * s2 + s) * h * dtheta0[i] +
         (-2 * s3 + 3 * s2) * theta0[i + 1] + (s3 - s2) * h * dtheta0[i + 1];
}

double StandingWaveProfile::dtheta_at(double z) const {
  if (z <= grid.lo || z >= grid.hi) return 0.0;
  const double h = grid.step();
  auto i = static_cast<std::size_t>((z - grid.lo) / h);
  if (i >= grid.n - 1) i = grid.n - 2;
  const double s = (z - grid.at(i)) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double m0 = potential.dW(theta0[i]);
  const double m1 = potential.dW(theta0[i + 1]);
  return (2 * s3 - 3 * s2 + 1) * dtheta0[i] + (s3 - 2 * s2 + s) * h * m0 +
         (-2 * s3 + 3 * s2) * dtheta0[i + 1] + (s3 - s2) * h * m1;
}

std::vector<double> StandingWaveProfile::mass_weights() const {
  auto w = trapezoid_weights(grid.n, grid.step());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= dtheta0[i] * dtheta0[i];
  return w;
}

namespace {

// Distance to a well along the half-line: x(0) = 1/2, x' = -sqrt(2 q(x)), where
// q is W for the left half (x = theta) and W(1 - .) for the right half
// (x = 1 - theta). Working with the distance avoids cancellation in W near 1.
// RK4 with `substeps` steps per grid cell.
std::vector<double> descend(const Potential& q, std::size_t steps, double h, int substeps) {
  auto rate = [&](double x) { return -std::sqrt(2.0 * std::max(q.W(x), 0.0)); };
  std::vector<double> x(steps + 1);
  x[0] = 0.5;
  const double k = h / substeps;
  double v = 0.5;
  for (std::size_t step = 1; step <= steps; ++step) {
    for (int s = 0; s < substeps; ++s) {
      const double k1 = rate(v);
      const double k2 = rate(v + 0.5 * k * k1);
      const double k3 = rate(v + 0.5 * k * k2);
      const double k4 = rate(v + k * k3);
      v += k * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    }
    x[step] = v;
  }
  return x;
}

std::vector<double> converged_descent(const Potential& q, std::size_t steps, double h) {
  int substeps = 4;
  auto coarse = descend(q, steps, h, substeps);
  for (;;) {
    auto fine = descend(q, steps, h, 2 * substeps);
    double diff = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) diff = std::max(diff, std::abs(fine[i] - coarse[i]));
    substeps *= 2;
    coarse = std::move(fine);
    if (diff <= 1e-13) return coarse;
    if (substeps > 2048) throw NumericalError("standing_wave: quadrature step refinement exhausted");
  }
}

}  // namespace

StandingWaveProfile standing_wave(const Potential& potential, double half_width,
                                  std::size_t n_points) {
  if (!(half_width >= 20.0)) throw std::invalid_argument("standing_wave: half_width must be >= 20");
  if (n_points < 1001 || n_points % 2 == 0)
    throw std::invalid_argument("standing_wave: n_points must be odd and >= 1001");

  StandingWaveProfile prof{potential, UniformGrid{-half_width, half_width, n_points}, {}, {}, 0.0, 0};
  const double h = prof.grid.step();

  const std::size_t mid = (n_points - 1) / 2;
  const Potential reflected = potential.mirrored();
  const auto left = converged_descent(potential, mid, h);
  const auto right = converged_descent(reflected, mid, h);
  prof.theta0.resize(n_points);
  prof.dtheta0.resize(n_points);
  for (std::size_t k = 0; k <= mid; ++k) {
    prof.theta0[mid - k] = left[k];
    prof.dtheta0[mid - k] = std::sqrt(2.0 * std::max(potential.W(left[k]), 0.0));
    prof.theta0[mid + k] = 1.0 - right[k];
    prof.dtheta0[mid + k] = std::sqrt(2.0 * std::max(reflected.W(right[k]), 0.0));
  }

  for (std::size_t i = 0; i < n_points; ++i) {
    const double th = prof.theta0[i];
    // far tails may round onto the wells exactly (1 - e^{-40} == 1)
    if (!(th >= 0.0 && th <= 1.0) || (i > 0 && th < prof.theta0[i - 1]))
      throw NumericalError("standing_wave: profile left [0,1] or lost monotonicity");
  }
  if (!(prof.theta0.front() < 1e-6 && prof.theta0.back() > 1.0 - 1e-6))
    throw NumericalError("standing_wave: tails not converged, increase half_width");

  std::vector<double> sq(n_points);
  for (std::size_t i = 0; i < n_points; ++i) sq[i] = prof.dtheta0[i] * prof.dtheta0[i];
  prof.c0 = trapezoid(sq, h);

  const std::uint64_t grid_bits[2] = {static_cast<std::uint64_t>(n_points),
                                      std::bit_cast<std::uint64_t>(half_width)};
  prof.signature = fnv1a(grid_bits, sizeof(grid_bits), potential.signature());
  return prof;
}

double profile_residual(const StandingWaveProfile& profile) {
  const double h = profile.grid.step();
  double worst = 0.0;
  const auto& th = profile.theta0;
  for (std::size_t i = 1; i + 1 < th.size(); ++i) {
    const double d2 = (th[i + 1] - 2 * th[i] + th[i - 1]) / (h * h);
    worst = std::max(worst, std::abs(d2 - profile.potential.dW(th[i])));
  }
  return worst;
}

double asymmetry_indicator(const Potential& potential) {
  auto integrand = [&](double rho) {
    return potential.d2W(rho) * 1.5 * std::sqrt(std::max(potential.W(rho), 0.0)) *
           potential.dW(rho);
  };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, 1.0, 15, 1e-9, &error);
  if (!std::isfinite(value)) throw NumericalError("asymmetry_indicator: quadrature failed");
  return value;
}

}  // namespace motility
