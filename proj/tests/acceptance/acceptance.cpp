// Acceptance checks. Usage: motility_acceptance [criterion ...]; no argument runs all.
// Prints one "PASS <name>: ..." or "FAIL <name>: ..." line per criterion, with
// indented detail lines, and exits non-zero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "motility/kernel.hpp"
#include "motility/pde1d.hpp"
#include "motility/pde2d.hpp"
#include "motility/sil1d.hpp"
#include "motility/sil2d.hpp"
#include "motility/stability.hpp"
#include "oracles.hpp"

using namespace motility;

namespace {

struct Outcome {
  bool pass = true;
  std::size_t checks = 0, passed = 0;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    ++checks;
    passed += ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

template <class... T>
std::string fmt(const char* f, T... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const StandingWaveProfile& quartic() {
  static const auto p = standing_wave(Potential::symmetric_quartic());
  return p;
}
const StandingWaveProfile& sextic() {
  static const auto p = standing_wave(Potential::asymmetric_sextic());
  return p;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

Outcome kernel() {
  Outcome o;
  const auto& p = quartic();
  const auto sol = solve_psi0(0.0, 1.0, p);
  double err = 0.0, err_line = 0.0;
  for (std::size_t i = 0; i < p.grid.n; i += 2) {
    const double z = p.grid.at(i);
    err = std::max(err, std::abs(sol.psi0[i] - oracle::quartic_psi0_truncated(z, 0.0, 1.0, p.grid.hi)));
    err_line = std::max(err_line, std::abs(sol.psi0[i] - oracle::quartic_psi0(z, 0.0, 1.0)));
  }
  o.check(err <= 1e-6, fmt("Psi0 vs Green's-function oracle on [-L, L] (V=0, beta=1): max error %.3e <= 1e-6", err));
  o.note(fmt("vs the infinite-line convolution: %.3e (truncation at |z| = %g)", err_line, p.grid.hi));
  for (double beta : {1.0, 150.0})
    for (double V : {0.5, 1.0, 2.0}) {
      const double d = std::abs(phi_beta(V, beta, p) - phi_beta(-V, beta, p));
      o.check(d < 1e-8 * beta, fmt("evenness beta=%g V=%g: |Phi(V)-Phi(-V)| = %.3e < %.1e", beta, V, d, 1e-8 * beta));
    }
  for (double V : {0.0, 1.0, -2.0}) {
    const double a = solve_psi0(V, 75.0, p).phi, b = solve_psi0(V, 150.0, p).phi;
    const double rel = std::abs(b - 2.0 * a) / std::abs(b);
    o.check(rel < 1e-10, fmt("linearity V=%g: |Phi_150 - 2 Phi_75| / |Phi_150| = %.3e < 1e-10", V, rel));
  }
  return o;
}

Outcome c0() {
  Outcome o;
  const double d = std::abs(quartic().c0 - std::numbers::sqrt2 / 12.0);
  o.check(d < 1e-6, fmt("c0 = %.15f, sqrt(2)/12 = %.15f, difference %.3e < 1e-6", quartic().c0,
                        std::numbers::sqrt2 / 12.0, d));
  return o;
}

Outcome sil_pde_consistency() {
  Outcome o;
  for (double F : {0.02, 0.05}) {
    Pde1dConfig c;
    c.eps = 0.02;
    c.beta = 0.0;
    c.forcing = Schedule::constant(F);
    c.t_end = 1.0;
    const auto r = simulate_1d(c);
    const auto& tr = r.track;
    const std::size_t k = tr.t.size() / 2;
    const double V = (tr.x.back() - tr.x[k]) / (tr.t.back() - tr.t[k]);
    const double expect = -F / quartic().c0;
    const double rel = std::abs(V - expect) / std::abs(expect);
    o.check(rel < 0.05, fmt("F=%g: PDE velocity %.6f vs -F/c0 = %.6f, relative %.4f < 0.05", F, V, expect, rel));
  }
  return o;
}

Outcome hysteresis() {
  Outcome o;
  const double beta = 150.0;
  const auto schedule = Schedule::hysteresis_loop();
  RootOptions ro;
  ro.v_scan = 25.0;
  ro.stability = StabilityMode::Monotone;
  const double V_start = sil_roots(schedule(0.0), beta, quartic(), ro).roots.back().V;
  const auto tr = run_hysteresis(schedule, beta, quartic(), V_start);
  const double area = loop_area(tr);
  for (const auto& f : tr.folds) o.note(fmt("fold at V=%.6f F=%.6f", f.V, f.F));
  o.check(tr.jumps.size() == 2 && area > 0.0,
          fmt("(a) SIL trace from V=%.6f: %zu jumps (need 2), loop area %.4f (need > 0)", V_start, tr.jumps.size(), area));
  for (const auto& j : tr.jumps) o.note(fmt("SIL jump at F=%.4f: V %.4f -> %.4f", j.F, j.V_before, j.V_after));

  Pde1dConfig c;
  c.eps = 0.01;
  c.beta = beta;
  c.forcing = schedule;
  c.t_end = schedule.t_end();
  c.initial_velocity = V_start;
  c.sample_interval = 1e-3;
  const auto r = simulate_1d(c);
  const auto pj = detect_jumps(r.track, 50.0, 20, 0.05);
  for (const auto& j : pj) o.note(fmt("PDE jump at F=%.4f: V %.4f -> %.4f", j.F, j.V_before, j.V_after));
  bool all = pj.size() == 2 && pj.size() == tr.jumps.size();
  std::ostringstream os;
  os << "(b) PDE eps=0.01: " << pj.size() << " jumps vs " << tr.jumps.size() << " SIL jumps";
  for (const auto& j : pj) {
    const Jump* match = nullptr;
    for (const auto& s : tr.jumps)
      if ((s.V_after > s.V_before) == (j.V_after > j.V_before)) match = &s;
    if (!match) {
      os << "; F=" << fmt("%.4f", j.F) << " has no SIL jump in the same direction";
      all = false;
      continue;
    }
    const double rel = std::abs(j.F - match->F) / std::abs(match->F);
    os << "; F=" << fmt("%.4f", j.F) << " vs SIL " << fmt("%.4f", match->F) << fmt(" (%.1f%%)", 100.0 * rel);
    all = all && rel <= 0.10;
  }
  o.check(all, os.str() + ", need every jump within 10%");
  return o;
}

Outcome tw_bifurcation() {
  Outcome o;
  for (double beta : {1.0, 50.0, 150.0}) {
    const auto roots = traveling_wave_roots(beta, quartic());
    o.check(roots.size() == 1 && roots[0] == 0.0,
            fmt("symmetric quartic beta=%g: %zu roots, only V=0 expected", beta, roots.size()));
  }
  const double closed = beta_critical_closed_form(sextic());
  const double bisect = beta_critical(sextic(), 1.0, 1e5);
  const double rel = std::abs(bisect - closed) / closed;
  o.check(rel <= 1e-3, fmt("sextic beta_critical: bisection %.4f vs closed form %.4f, relative %.2e <= 1e-3", bisect,
                           closed, rel));
  const auto below = traveling_wave_roots(0.9 * closed, sextic());
  o.check(below.size() == 1, fmt("sextic at 0.9 beta_critical: %zu roots (only 0 expected)", below.size()));
  const double beta = 1.5 * closed;
  const auto roots = traveling_wave_roots(beta, sextic());
  const double V0 = roots.back();
  o.check(roots.size() == 3 && V0 > 0.0, fmt("sextic at 1.5 beta_critical = %.2f: V0 = +-%.6f", beta, V0));
  CellConfig c;
  c.potential = Potential::asymmetric_sextic();
  c.eps = 0.02;
  c.beta = beta;
  c.t_end = 0.5;
  try {
    const auto r = simulate_two_interface_cell(c);
    const double e = std::abs(std::abs(r.velocity) - V0) / V0;
    o.check(e <= 0.10, fmt("two-interface PDE eps=0.02: speed %.4f vs V0 %.4f, relative %.3f <= 0.10", std::abs(r.velocity),
                           V0, e));
  } catch (const std::exception& e) {
    o.check(false, std::string("two-interface PDE eps=0.02 failed: ") + e.what());
  }
  return o;
}

Outcome stability() {
  Outcome o;
  const auto p = stability_profile(Potential::symmetric_quartic());
  const auto Vs = linspace(-3.0, 1.4, 20);
  for (double beta : {50.0, 150.0}) {
    std::size_t agree = 0, unstable_ok = 0, unstable = 0;
    for (double V : Vs) {
      const auto rep = is_stable(V, beta, p);
      const double slope = phi_beta_prime(V, beta, p);
      const bool monotone = p.c0 > slope;
      if (rep.stable == monotone) ++agree;
      else o.note(fmt("beta=%g V=%.4f: spectral %d, c0 - Phi' = %.3e, max Re = %.3e", beta, V, rep.stable,
                      p.c0 - slope, rep.max_real));
      if (!monotone) {
        ++unstable;
        if (rep.max_real >= -1e-6) ++unstable_ok;
      }
    }
    o.check(agree == Vs.size(), fmt("beta=%g: spectral label equals c0 > Phi' at %zu/%zu velocities", beta, agree, Vs.size()));
    o.check(unstable_ok == unstable,
            fmt("beta=%g: %zu/%zu velocities with c0 <= Phi' have an eigenvalue with Re >= -1e-6", beta, unstable_ok, unstable));
  }
  return o;
}

Outcome pde2d_invariants() {
  Outcome o;
  Pde2dConfig c;  // eps 0.04, 256^2, t_end 0.05
  c.contour_stride = 0;
  const auto r = simulate_2d(c);
  const auto& m0 = r.monitors.front();
  double drift = 0.0, lo = 1e300, hi = -1e300, energy = 0.0;
  for (const auto& m : r.monitors) {
    drift = std::max(drift, std::abs(m.mass - m0.mass) / m0.mass);
    lo = std::min(lo, m.rho_min);
    hi = std::max(hi, m.rho_max);
    energy = std::max(energy, m.E + m.F);
  }
  const double band = std::pow(c.eps, 0.25);
  const double limit = 3.0 * (m0.E + m0.F + 1.0);
  o.note(fmt("eps=%g beta=%g grid %zux%zu t_end=%g, %zu steps", c.eps, c.beta, c.nx, c.ny, c.t_end, r.steps));
  o.check(drift < 1e-6, fmt("mass drift %.3e < 1e-6", drift));
  o.check(lo >= -band && hi <= 1.0 + band && r.band_violations == 0,
          fmt("rho in [%.6f, %.6f] within [-%.4f, 1+%.4f]", lo, hi, band, band));
  o.check(energy <= limit, fmt("max E+F = %.4f <= 3 (E0+F0+1) = %.4f", energy, limit));
  return o;
}

Outcome sil2d() {
  Outcome o;
  PhiTable phi(0.0, quartic());
  {
    const auto c = make_circle(0.5, 0.5, 0.25, 128);
    const double ds = perimeter(c) / 128.0;
    EvolveOptions eo;
    eo.record_every = 1000000;
    const auto run = evolve_curve(c, 0.2 * ds * ds, 0.01, phi, eo);
    double disp = 0.0;
    for (const auto& s : run.samples)
      for (std::size_t i = 0; i < c.size(); ++i)
        disp = std::max(disp, std::hypot(s.nodes[i][0] - c[i][0], s.nodes[i][1] - c[i][1]));
    o.check(disp < 1e-6, fmt("beta=0 circle r=0.25, t=0.01: max displacement %.3e < 1e-6", disp));
  }
  {
    const auto c = make_ellipse(0.5, 0.5, 0.3, 0.2, 128);
    const double ds = perimeter(c) / 128.0;
    EvolveOptions eo;
    eo.record_every = 10;
    const auto run = evolve_curve(c, 0.2 * ds * ds, 0.05, phi, eo);
    const double a0 = run.samples.front().area;
    double drift = 0.0;
    bool monotone = true;
    double prev = 1e300;
    for (const auto& s : run.samples) {
      drift = std::max(drift, std::abs(s.area - a0) / a0);
      const double iso = s.perimeter * s.perimeter / (4.0 * std::numbers::pi * s.area);
      monotone = monotone && iso <= prev;
      prev = iso;
    }
    o.check(drift < 1e-3, fmt("ellipse 0.3x0.2, t=0.05: max area drift %.3e < 1e-3", drift));
    o.check(monotone, fmt("isoperimetric ratio decreases monotonically over %zu samples (final %.6f)",
                          run.samples.size(), prev));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"kernel", kernel},
      {"c0", c0},
      {"sil_pde_consistency", sil_pde_consistency},
      {"hysteresis", hysteresis},
      {"tw_bifurcation", tw_bifurcation},
      {"stability", stability},
      {"pde2d_invariants", pde2d_invariants},
      {"sil2d", sil2d},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  if (wanted.empty())
    for (const auto& [name, fn] : all) wanted.push_back(name);
  int failures = 0;
  for (const auto& name : wanted) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const auto& p) { return p.first == name; });
    if (it == all.end()) {
      std::printf("FAIL %s: unknown criterion\n", name.c_str());
      ++failures;
      continue;
    }
    Outcome out;
    try {
      out = it->second();
    } catch (const std::exception& e) {
      out.check(false, std::string("threw: ") + e.what());
    }
    std::printf("%s %s: %zu/%zu checks passed\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.passed, out.checks);
    for (const auto& d : out.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}
