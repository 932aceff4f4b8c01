#include "motility/sil1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "motility/stability.hpp"

namespace motility {

namespace {

// Phi_beta sampled on the scan grid -v_scan + k * v_step. Node values are
// recomputed with the same expression every time so the cache keys repeat.
struct ResponseTable {
  std::vector<double> V;
  std::vector<double> phi;
};

ResponseTable response_table(double beta, const StandingWaveProfile& profile, double lo, double hi,
                             double step) {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("scan grid: need step > 0 and hi > lo");
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9)) + 1;
  ResponseTable t;
  t.V.resize(count);
  t.phi.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    t.V[k] = std::min(lo + static_cast<double>(k) * step, hi);
    t.phi[k] = phi_beta(t.V[k], beta, profile);
  }
  return t;
}

void push_unique(std::vector<double>& roots, double v) {
  for (double r : roots)
    if (std::abs(r - v) < 1e-6) return;
  roots.push_back(v);
}

std::string describe_scan(double F, double v_scan) {
  std::ostringstream os;
  os << "no root of c0 V = Phi_beta(V) - F in [-" << v_scan << ", " << v_scan << "] for F = " << F;
  return os.str();
}

}  // namespace

double sil_residual(double V, double F, double beta, const StandingWaveProfile& profile) {
  return profile.c0 * V - phi_beta(V, beta, profile) + F;
}

RootSet sil_roots(double F, double beta, const StandingWaveProfile& profile,
                  const RootOptions& options) {
  const auto table = response_table(beta, profile, -options.v_scan, options.v_scan, options.v_step);
  auto g = [&](double V) { return sil_residual(V, F, beta, profile); };

  std::vector<double> found;
  const std::size_t count = table.V.size();
  std::vector<double> gk(count);
  for (std::size_t k = 0; k < count; ++k) gk[k] = profile.c0 * table.V[k] - table.phi[k] + F;
  for (std::size_t k = 0; k < count; ++k) {
    if (gk[k] == 0.0) {
      push_unique(found, table.V[k]);
      continue;
    }
    if (k + 1 < count && gk[k + 1] != 0.0 && (gk[k] > 0.0) != (gk[k + 1] > 0.0))
      push_unique(found,
                  polish_root(g, table.V[k], table.V[k + 1], gk[k], gk[k + 1], options.tol));
  }
  if (found.empty()) throw NumericalError("sil_roots: " + describe_scan(F, options.v_scan));
  std::sort(found.begin(), found.end());

  std::unique_ptr<StandingWaveProfile> own_spectral;
  const StandingWaveProfile* spectral = options.spectral_profile;
  if (options.stability == StabilityMode::Spectral && spectral == nullptr && beta > 0.0) {
    own_spectral = std::make_unique<StandingWaveProfile>(stability_profile(profile.potential));
    spectral = own_spectral.get();
  }

  RootSet out{F, beta, {}};
  for (double V : found) {
    Root r;
    r.V = V;
    r.phi_prime = phi_beta_prime(V, beta, profile);
    if (options.stability == StabilityMode::Monotone || beta == 0.0)
      r.stable = profile.c0 > r.phi_prime;
    else
      r.stable = is_stable(V, beta, *spectral, options.margin).stable;
    out.roots.push_back(r);
  }
  return out;
}

std::vector<double> traveling_wave_roots(double beta, const StandingWaveProfile& profile,
                                         const RootOptions& options) {
  auto h = [&](double V) {
    return 2.0 * profile.c0 * V - phi_beta(V, beta, profile) + phi_beta(-V, beta, profile);
  };
  std::vector<double> nodes;
  nodes.push_back(std::min(1e-4, 0.1 * options.v_step));
  for (double V = options.v_step; V <= options.v_scan + 1e-12; V += options.v_step) nodes.push_back(V);

  std::vector<double> positive;
  double prev_v = nodes.front();
  double prev_h = h(prev_v);
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double v = nodes[k];
    const double hv = h(v);
    if (hv == 0.0) {
      push_unique(positive, v);
    } else if (prev_h != 0.0 && (prev_h > 0.0) != (hv > 0.0)) {
      push_unique(positive, polish_root(h, prev_v, v, prev_h, hv, options.tol));
    }
    prev_v = v;
    prev_h = hv;
  }

  std::vector<double> roots{0.0};
  for (double v : positive) {
    roots.push_back(v);
    roots.push_back(-v);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace {

bool response_is_even(const StandingWaveProfile& profile) {
  const double scale = std::abs(phi_beta(0.0, 1.0, profile));
  for (double V : {0.5, 1.0, 2.0})
    if (std::abs(phi_beta(V, 1.0, profile) - phi_beta(-V, 1.0, profile)) > 1e-9 * scale) return false;
  return true;
}

}  // namespace

double beta_critical_closed_form(const StandingWaveProfile& profile, double beta_ref) {
  if (response_is_even(profile)) throw std::invalid_argument("no bifurcation: response is even");
  const double slope = phi_beta_prime(0.0, beta_ref, profile);
  if (!(slope > 0.0))
    throw std::invalid_argument("no bifurcation: Phi_beta'(0) <= 0 for this potential");
  return profile.c0 * beta_ref / slope;
}

double beta_critical(const StandingWaveProfile& profile, double beta_lo, double beta_hi,
                     double rel_tol) {
  if (response_is_even(profile)) throw std::invalid_argument("no bifurcation: response is even");
  if (!(beta_lo >= 0.0 && beta_hi > beta_lo)) throw std::invalid_argument("beta_critical: need 0 <= lo < hi");
  auto onset = [&](double beta) { return phi_beta_prime(0.0, beta, profile) > profile.c0; };
  if (onset(beta_lo) || !onset(beta_hi)) {
    std::ostringstream os;
    os << "beta_critical: range [" << beta_lo << ", " << beta_hi << "] does not bracket the bifurcation";
    throw std::invalid_argument(os.str());
  }
  while (beta_hi - beta_lo > rel_tol * 0.5 * beta_hi) {
    const double mid = 0.5 * (beta_lo + beta_hi);
    (onset(mid) ? beta_hi : beta_lo) = mid;
  }
  return 0.5 * (beta_lo + beta_hi);
}

std::vector<Fold> fold_points(double beta, const StandingWaveProfile& profile, double v_scan,
                              double v_step) {
  std::vector<Fold> folds;
  if (beta == 0.0) return folds;
  const auto table = response_table(beta, profile, -v_scan, v_scan, v_step);
  const std::size_t count = table.V.size();
  auto slope_gap = [&](double V) { return profile.c0 - phi_beta_prime(V, beta, profile); };
  std::vector<double> d(count, 0.0);
  for (std::size_t k = 1; k + 1 < count; ++k)
    d[k] = profile.c0 - (table.phi[k + 1] - table.phi[k - 1]) / (table.V[k + 1] - table.V[k - 1]);
  for (std::size_t k = 1; k + 2 < count; ++k) {
    if ((d[k] > 0.0) == (d[k + 1] > 0.0)) continue;
    const double a = table.V[k];
    const double b = table.V[k + 1];
    const double V = polish_root(slope_gap, a, b, slope_gap(a), slope_gap(b), 1e-10);
    folds.push_back({V, phi_beta(V, beta, profile) - profile.c0 * V});
  }
  return folds;
}

Schedule::Schedule(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw std::invalid_argument("schedule: needs at least one knot");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i].first) || !std::isfinite(knots_[i].second))
      throw std::invalid_argument("schedule: non-finite knot");
    if (i > 0 && !(knots_[i].first > knots_[i - 1].first))
      throw std::invalid_argument("schedule: knot times must increase strictly");
  }
}

Schedule Schedule::constant(double F, double t_end) { return Schedule({{0.0, F}, {t_end, F}}); }

Schedule Schedule::hysteresis_loop(double F_low, double F_high) {
  return Schedule({{0.0, F_low}, {1.0, F_high}, {2.0, F_low}});
}

double Schedule::operator()(double t) const {
  if (t <= knots_.front().first) return knots_.front().second;
  if (t >= knots_.back().first) return knots_.back().second;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double x, const auto& k) { return x < k.first; });
  const auto& [t1, f1] = *it;
  const auto& [t0, f0] = *(it - 1);
  const double s = (t - t0) / (t1 - t0);
  return f0 + s * (f1 - f0);
}

double Schedule::max_abs() const {
  double m = 0.0;
  for (const auto& k : knots_) m = std::max(m, std::abs(k.second));
  return m;
}

namespace {

// Interval of V between consecutive folds on which c0 > Phi_beta'(V); there
// g(V) = c0 V - Phi_beta(V) + F increases, so it holds at most one root.
struct Branch {
  double lo;
  double hi;
  int id;
};

class BranchSet {
 public:
  BranchSet(double beta, const StandingWaveProfile& profile, double v_scan, const std::vector<Fold>& folds,
            double tol)
      : beta_(beta), profile_(profile), tol_(tol) {
    std::vector<double> edges{-v_scan};
    for (const auto& f : folds) edges.push_back(f.V);
    edges.push_back(v_scan);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double mid = 0.5 * (edges[i] + edges[i + 1]);
      if (profile.c0 > phi_beta_prime(mid, beta, profile))
        branches_.push_back({edges[i], edges[i + 1], static_cast<int>(i)});
    }
  }

  const std::vector<Branch>& branches() const { return branches_; }

  std::optional<double> root(const Branch& b, double F) const {
    const double glo = g(b.lo, F);
    const double ghi = g(b.hi, F);
    if (glo > 0.0 || ghi < 0.0) return std::nullopt;
    return polish_root([&](double V) { return g(V, F); }, b.lo, b.hi, glo, ghi, tol_);
  }

  double g(double V, double F) const { return sil_residual(V, F, beta_, profile_); }

 private:
  double beta_;
  const StandingWaveProfile& profile_;
  double tol_;
  std::vector<Branch> branches_;
};

}  // namespace

HysteresisTrace run_hysteresis(const Schedule& schedule, double beta,
                               const StandingWaveProfile& profile, double V_start,
                               const HysteresisOptions& options) {
  if (options.samples_per_segment < 2) throw std::invalid_argument("run_hysteresis: samples_per_segment < 2");
  const double v_scan = std::max(options.v_scan, 1.5 * schedule.max_abs() / profile.c0 + 2.0);

  HysteresisTrace trace;
  trace.beta = beta;
  trace.folds = fold_points(beta, profile, v_scan, options.v_step);
  const BranchSet set(beta, profile, v_scan, trace.folds, options.tol);
  if (set.branches().empty()) throw NumericalError("run_hysteresis: no stable branch in the scan range");

  std::vector<double> times;
  const auto& knots = schedule.knots();
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double t0 = knots[i].first;
    const double dt = (knots[i + 1].first - t0) / static_cast<double>(options.samples_per_segment);
    for (std::size_t j = 0; j < options.samples_per_segment; ++j) times.push_back(t0 + dt * static_cast<double>(j));
  }
  times.push_back(knots.back().first);

  auto nearest_stable = [&](double F, double target, std::optional<int> exclude)
      -> std::optional<std::pair<const Branch*, double>> {
    std::optional<std::pair<const Branch*, double>> best;
    for (const auto& b : set.branches()) {
      if (exclude && b.id == *exclude) continue;
      if (auto r = set.root(b, F))
        if (!best || std::abs(*r - target) < std::abs(best->second - target)) best = {{&b, *r}};
    }
    return best;
  };

  const double F0 = schedule(times.front());
  auto start = nearest_stable(F0, V_start, std::nullopt);
  if (!start || std::abs(start->second - V_start) > options.capture_radius) {
    std::ostringstream os;
    os << "run_hysteresis: V_start = " << V_start << " is not within the capture radius of a stable root at F = " << F0;
    throw std::invalid_argument(os.str());
  }
  const Branch* branch = start->first;
  double V = start->second;

  std::unique_ptr<StandingWaveProfile> coarse;
  double t_prev = times.front();

  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double F = schedule(t);
    int flag = 0;
    if (auto r = set.root(*branch, F)) {
      V = *r;
    } else {
      // The branch ended at a fold between t_prev and t: locate the crossing.
      double a = t_prev;
      double b = t;
      for (int it = 0; it < 60 && b - a > 1e-14 * (1.0 + std::abs(b)); ++it) {
        const double mid = 0.5 * (a + b);
        (set.root(*branch, schedule(mid)) ? a : b) = mid;
      }
      const double t_jump = a;
      const double F_jump = schedule(t_jump);
      const double V_before = set.root(*branch, F_jump).value_or(V);

      // Resolve the destination by the reduced dynamics, seeded at the abandoned state
      // and forced slightly past the fold so the coarse relaxation grid has lost it too.
      if (!coarse)
        coarse = std::make_unique<StandingWaveProfile>(
            standing_wave(profile.potential, profile.grid.hi, options.relax_points));
      const double push = std::max(std::abs(F - F_jump), 1e-2 * (1.0 + std::abs(F_jump)));
      const double F_probe = F_jump + (F >= F_jump ? push : -push);
      auto U0 = solve_psi0(V_before, beta, *coarse).psi0;
      RelaxOptions ro;
      ro.t_end = options.relax_t_end;
      ro.stop_rate = 1e-7;
      ro.record_every = 1000;
      const auto relaxed = relax_reduced([F_probe](double) { return F_probe; }, beta, *coarse, std::move(U0), ro);
      const double V_relaxed = relaxed.V.back();

      auto dest = nearest_stable(F, V_relaxed, branch->id);
      if (!dest) {
        std::ostringstream os;
        os << "run_hysteresis: no stable root at F = " << F;
        throw NumericalError(os.str());
      }
      branch = dest->first;
      V = dest->second;
      trace.jumps.push_back({t_jump, F_jump, V_before, V});
      flag = 1;
    }
    trace.t.push_back(t);
    trace.F.push_back(F);
    trace.V.push_back(V);
    trace.branch_id.push_back(static_cast<int>(
        std::count_if(trace.folds.begin(), trace.folds.end(), [&](const Fold& f) { return f.V < V; })));
    trace.jump_flag.push_back(flag);
    t_prev = t;
  }
  return trace;
}

double loop_area(const HysteresisTrace& trace) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < trace.V.size(); ++i)
    area += 0.5 * (trace.V[i] + trace.V[i + 1]) * (trace.F[i + 1] - trace.F[i]);
  return area;
}

}  // namespace motility
