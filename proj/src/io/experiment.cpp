#include "motility/io/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "motility/io/csv.hpp"
#include "motility/kernel.hpp"
#include "motility/pde1d.hpp"
#include "motility/pde2d.hpp"
#include "motility/sil1d.hpp"
#include "motility/sil2d.hpp"
#include "motility/stability.hpp"

#ifndef MOTILITY_VERSION
#define MOTILITY_VERSION "unknown"
#endif

namespace motility::io {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Shared run plumbing: output directory, resolved config, file list, manifest.
class Run {
 public:
  Run(std::string experiment, std::filesystem::path dir, unsigned threads)
      : threads(std::max(1u, threads)) {
    report.experiment = std::move(experiment);
    report.output_dir = std::move(dir);
  }

  // Validates the whole config, then creates the directory and writes resolved.cfg.
  void start(const ParamReader& r) {
    r.finish();
    report.parameter_hash = r.resolved().hash({"output_dir"});
    std::filesystem::create_directories(report.output_dir);
    std::ofstream out(report.output_dir / "resolved.cfg", std::ios::binary | std::ios::trunc);
    out << r.resolved().render();
    if (!out) throw std::runtime_error("cannot write " + (report.output_dir / "resolved.cfg").string());
    report.files.push_back("resolved.cfg");
    start_time_ = utc_now();
  }

  CsvWriter csv(const std::string& name, std::string_view schema_id) {
    report.files.push_back(name);
    return CsvWriter(report.output_dir / name, schema_id);
  }
  void table(const std::string& name, std::string_view schema_id, const std::vector<Row>& rows) {
    write_csv(report.output_dir / name, schema_id, rows);
    report.files.push_back(name);
  }
  void result(const std::string& key, double v) { report.results[key] = format_real(v); }
  void result(const std::string& key, std::size_t v) { report.results[key] = std::to_string(v); }

  void manifest(const std::string& status, const std::string& error = {}) {
    std::ofstream out(report.output_dir / "manifest.txt", std::ios::binary | std::ios::trunc);
    out << "experiment = " << report.experiment << "\n"
        << "version = " << MOTILITY_VERSION << "\n"
        << "parameter_hash = " << hex(report.parameter_hash) << "\n"
        << "start_time = " << start_time_ << "\n"
        << "end_time = " << utc_now() << "\n"
        << "status = " << status << "\n";
    if (!error.empty()) out << "error = " << error << "\n";
    for (const auto& f : report.files) out << "file = " << f << "\n";
    for (const auto& [k, v] : report.results) out << "result." << k << " = " << v << "\n";
  }
  bool started() const { return !start_time_.empty(); }

  RunReport report;
  unsigned threads;

 private:
  std::string start_time_;
};

// ---- shared parameter groups -------------------------------------------------

double positive(ParamReader& r, const std::string& key, double fallback) {
  const double v = r.real(key, fallback);
  if (!(v > 0.0)) r.reject(key, "must be > 0");
  return v;
}

double non_negative(ParamReader& r, const std::string& key, double fallback) {
  const double v = r.real(key, fallback);
  if (!(v >= 0.0)) r.reject(key, "must be >= 0");
  return v;
}

std::size_t count(ParamReader& r, const std::string& key, std::int64_t fallback, std::int64_t min) {
  const auto v = r.integer(key, fallback);
  if (v < min) {
    r.reject(key, "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(std::max<std::int64_t>(min, 0));
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> non_negative_list(ParamReader& r, const std::string& key, const std::vector<double>& fallback) {
  auto v = r.reals(key, fallback);
  if (v.empty()) r.reject(key, "must not be empty");
  for (double x : v)
    if (!(x >= 0.0)) r.reject(key, "values must be >= 0");
  return v;
}

std::optional<Potential> read_potential(ParamReader& r, const std::string& fallback) {
  const auto name = r.choice("potential", fallback, {"symmetric-quartic", "asymmetric-sextic", "polynomial"});
  std::vector<double> coeffs;
  if (name == "polynomial") {
    coeffs = r.reals("potential.coefficients", {});
    if (coeffs.empty()) r.reject("potential.coefficients", "required for potential = polynomial");
  } else {
    r.accept("potential.coefficients");
    if (r.present("potential.coefficients"))
      r.reject("potential.coefficients", "only allowed with potential = polynomial");
  }
  try {
    if (name == "polynomial" && coeffs.empty()) return std::nullopt;
    return Potential::make(parse_potential_kind(name), coeffs);
  } catch (const std::invalid_argument& e) {
    r.reject("potential", e.what());
    return std::nullopt;
  }
}

struct ProfileSpec {
  double half_width = kDefaultHalfWidth;
  std::size_t points = kDefaultProfilePoints;
};

ProfileSpec read_profile(ParamReader& r, std::size_t default_points) {
  ProfileSpec p;
  p.half_width = r.real("profile.half_width", kDefaultHalfWidth);
  if (!(p.half_width >= 20.0)) r.reject("profile.half_width", "must be >= 20");
  p.points = count(r, "profile.points", static_cast<std::int64_t>(default_points), 1001);
  if (p.points % 2 == 0) r.reject("profile.points", "must be odd");
  return p;
}

Schedule read_schedule(ParamReader& r, const std::vector<std::pair<double, double>>& fallback) {
  auto knots = r.pairs("schedule.knots", fallback);
  try {
    return Schedule(knots);
  } catch (const std::invalid_argument& e) {
    r.reject("schedule.knots", e.what());
    return Schedule(fallback);
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return v;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void write_snapshots_1d(Run& run, const std::vector<Snapshot1D>& snaps) {
  if (snaps.empty()) return;
  std::vector<Row> index;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshots/snapshot_%06zu.csv", k);
    auto w = run.csv(name, "snapshot");
    const auto& s = snaps[k];
    for (std::size_t i = 0; i < s.x.size(); ++i) w.row({s.x[i], s.rho[i], s.P[i]});
    w.close();
    index.push_back({static_cast<std::int64_t>(k), s.t});
  }
  run.table("snapshot_index.csv", "snapshot_index", index);
}

// ---- experiments -------------------------------------------------------------

void exp_kernel(ParamReader& r, Run& run) {
  const auto pot = read_potential(r, "symmetric-quartic");
  const auto ps = read_profile(r, kDefaultProfilePoints);
  const double V = r.real("V", 0.0);
  const double beta = non_negative(r, "beta", 1.0);
  const double v_min = r.real("phi.v_min", -3.0);
  const double v_max = r.real("phi.v_max", 3.0);
  const auto v_count = count(r, "phi.v_count", 121, 1);
  if (!(v_max >= v_min)) r.reject("phi.v_max", "must be >= phi.v_min");
  run.start(r);

  const auto profile = standing_wave(*pot, ps.half_width, ps.points);
  auto w = run.csv("profile.csv", "profile");
  for (std::size_t i = 0; i < profile.grid.n; ++i)
    w.row({profile.grid.at(i), profile.theta0[i], profile.dtheta0[i]});
  w.close();

  const auto sol = solve_psi0(V, beta, profile);
  auto k = run.csv("kernel.csv", "kernel");
  for (std::size_t i = 0; i < sol.grid.n; ++i) k.row({sol.grid.at(i), sol.psi0[i]});
  k.close();

  const auto vs = linspace(v_min, v_max, v_count);
  std::vector<Row> rows(vs.size());
  parallel_for(vs.size(), run.threads, [&](std::size_t i) {
    rows[i] = {vs[i], phi_beta(vs[i], beta, profile), phi_beta_prime(vs[i], beta, profile)};
  });
  run.table("phi.csv", "phi", rows);
  run.result("c0", profile.c0);
  run.result("phi", sol.phi);
  run.result("kernel_residual", kernel_residual(sol, profile));
}

void exp_sil_roots(ParamReader& r, Run& run) {
  const auto pot = read_potential(r, "symmetric-quartic");
  const auto ps = read_profile(r, kDefaultProfilePoints);
  const double beta = non_negative(r, "beta", 150.0);
  const auto Fs = r.reals("F", {-2.25});
  if (Fs.empty()) r.reject("F", "must not be empty");
  RootOptions o;
  o.v_scan = positive(r, "roots.v_scan", 20.0);
  o.v_step = positive(r, "roots.v_step", 0.02);
  o.stability = r.choice("roots.stability", "spectral", {"spectral", "monotone"}) == "spectral"
                    ? StabilityMode::Spectral
                    : StabilityMode::Monotone;
  run.start(r);

  const auto profile = standing_wave(*pot, ps.half_width, ps.points);
  std::optional<StandingWaveProfile> spectral;
  if (o.stability == StabilityMode::Spectral) {
    spectral = stability_profile(*pot);
    o.spectral_profile = &*spectral;
  }
  std::vector<RootSet> sets(Fs.size());
  parallel_for(Fs.size(), run.threads, [&](std::size_t i) { sets[i] = sil_roots(Fs[i], beta, profile, o); });
  std::vector<Row> rows;
  std::size_t total = 0;
  for (const auto& s : sets)
    for (const auto& root : s.roots) {
      rows.push_back({s.F, root.V, std::int64_t{root.stable}});
      ++total;
    }
  run.table("roots.csv", "roots", rows);
  run.result("roots", total);
}

void exp_tw(ParamReader& r, Run& run) {
  const auto pot = read_potential(r, "symmetric-quartic");
  const auto ps = read_profile(r, kDefaultProfilePoints);
  const auto betas = non_negative_list(r, "beta", {1.0, 50.0, 150.0});
  RootOptions o;
  o.v_scan = positive(r, "roots.v_scan", 10.0);
  o.v_step = positive(r, "roots.v_step", 0.02);
  run.start(r);

  const auto profile = standing_wave(*pot, ps.half_width, ps.points);
  std::vector<std::vector<double>> roots(betas.size());
  parallel_for(betas.size(), run.threads,
               [&](std::size_t i) { roots[i] = traveling_wave_roots(betas[i], profile, o); });
  std::vector<Row> rows;
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < betas.size(); ++i)
    for (double V : roots[i]) {
      rows.push_back({betas[i], V});
      if (V != 0.0) ++nonzero;
    }
  run.table("tw_roots.csv", "tw_roots", rows);
  run.result("nonzero_roots", nonzero);
}

void exp_beta_crit(ParamReader& r, Run& run) {
  const auto pot = read_potential(r, "asymmetric-sextic");
  const auto ps = read_profile(r, kDefaultProfilePoints);
  const double lo = positive(r, "beta.lo", 1.0);
  const double hi = positive(r, "beta.hi", 1e5);
  const double ref = positive(r, "beta.ref", 1.0);
  const double rel_tol = positive(r, "beta.rel_tol", 1e-3);
  if (!(hi > lo)) r.reject("beta.hi", "must be > beta.lo");
  run.start(r);

  const auto profile = standing_wave(*pot, ps.half_width, ps.points);
  const double closed = beta_critical_closed_form(profile, ref);
  const double bisect = beta_critical(profile, lo, hi, rel_tol);
  const double slope = phi_beta_prime(0.0, ref, profile);
  run.table("beta_critical.csv", "beta_critical", {{bisect, closed, profile.c0, slope}});
  run.result("beta_bisection", bisect);
  run.result("beta_closed_form", closed);
}

void exp_hysteresis(ParamReader& r, Run& run) {
  const auto pot = read_potential(r, "symmetric-quartic");
  const auto ps = read_profile(r, kDefaultProfilePoints);
  const double beta = non_negative(r, "beta", 150.0);
  const auto schedule = read_schedule(r, Schedule::hysteresis_loop().knots());
  const auto v_start = r.text("hysteresis.v_start", "max");
  HysteresisOptions o;
  o.samples_per_segment = count(r, "hysteresis.samples_per_segment", 2000, 2);
  o.v_scan = positive(r, "hysteresis.v_scan", 10.0);
  o.v_step = positive(r, "hysteresis.v_step", 0.02);
  o.capture_radius = positive(r, "hysteresis.capture_radius", 0.2);
  o.relax_points = count(r, "hysteresis.relax_points", 1001, 1001);
  if (o.relax_points % 2 == 0) r.reject("hysteresis.relax_points", "must be odd");
  o.relax_t_end = positive(r, "hysteresis.relax_t_end", 200.0);
  std::optional<double> V0;
  if (v_start != "max" && v_start != "min") {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(v_start.data(), v_start.data() + v_start.size(), v);
    if (ec != std::errc() || p != v_start.data() + v_start.size()) r.reject("hysteresis.v_start", "expected max, min or a number");
    else V0 = v;
  }
  run.start(r);

  const auto profile = standing_wave(*pot, ps.half_width, ps.points);
  if (!V0) {
    RootOptions ro;
    ro.v_scan = std::max(o.v_scan, 1.5 * schedule.max_abs() / profile.c0 + 2.0);
    ro.v_step = o.v_step;
    ro.stability = StabilityMode::Monotone;
    const auto set = sil_roots(schedule(schedule.t_begin()), beta, profile, ro);
    std::vector<double> stable;
    for (const auto& root : set.roots)
      if (root.stable) stable.push_back(root.V);
    if (stable.empty()) throw NumericalError("no stable root at the start of the schedule");
    V0 = v_start == "max" ? stable.back() : stable.front();
  }
  const auto trace = run_hysteresis(schedule, beta, profile, *V0, o);
  auto w = run.csv("hysteresis.csv", "hysteresis");
  for (std::size_t i = 0; i < trace.t.size(); ++i)
    w.row({trace.t[i], trace.F[i], trace.V[i], std::int64_t{trace.branch_id[i]}, std::int64_t{trace.jump_flag[i]}});
  w.close();
  std::vector<Row> jumps, folds;
  for (const auto& j : trace.jumps) jumps.push_back({j.t, j.F, j.V_before, j.V_after});
  for (const auto& f : trace.folds) folds.push_back({f.V, f.F});
  run.table("jumps.csv", "jumps", jumps);
  run.table("folds.csv", "folds", folds);
  run.result("jumps", trace.jumps.size());
  run.result("loop_area", loop_area(trace));
  run.result("V_start", *V0);
}

void exp_stability(ParamReader& r, Run& run) {
  const auto pot = read_potential(r, "symmetric-quartic");
  const auto ps = read_profile(r, kStabilityProfilePoints);
  const auto betas = non_negative_list(r, "beta", {50.0, 150.0});
  const double v_min = r.real("stability.v_min", -3.0);
  const double v_max = r.real("stability.v_max", 1.4);
  const auto v_count = count(r, "stability.v_count", 20, 1);
  const double margin = non_negative(r, "stability.margin", kStabilityMargin);
  if (!(v_max >= v_min)) r.reject("stability.v_max", "must be >= stability.v_min");
  run.start(r);

  const auto profile = standing_wave(*pot, ps.half_width, ps.points);
  const auto vs = linspace(v_min, v_max, v_count);
  std::vector<Row> rows(vs.size() * betas.size());
  std::atomic<std::size_t> disagree{0};
  parallel_for(rows.size(), run.threads, [&](std::size_t k) {
    const double beta = betas[k / vs.size()];
    const double V = vs[k % vs.size()];
    const auto rep = is_stable(V, beta, profile, margin);
    const double slope = phi_beta_prime(V, beta, profile);
    if (rep.stable != (profile.c0 > slope)) ++disagree;
    rows[k] = {V, beta, rep.max_real, std::int64_t{rep.stable}, slope, profile.c0};
  });
  run.table("stability.csv", "stability", rows);
  run.result("disagreements", disagree.load());
}

void exp_pde1d(ParamReader& r, Run& run) {
  Pde1dConfig c;
  const auto pot = read_potential(r, "symmetric-quartic");
  c.eps = positive(r, "eps", 0.02);
  c.beta = non_negative(r, "beta", 0.0);
  c.forcing = read_schedule(r, {{0.0, 0.02}});
  c.t_end = positive(r, "t_end", 1.0);
  c.half_length = positive(r, "half_length", 1.0);
  c.cells_per_eps = static_cast<int>(count(r, "cells_per_eps", 8, 8));
  const auto iv = r.text("initial_velocity", "none");
  if (iv != "none") {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(iv.data(), iv.data() + iv.size(), v);
    if (ec != std::errc() || p != iv.data() + iv.size()) r.reject("initial_velocity", "expected none or a number");
    else c.initial_velocity = v;
  }
  c.initial_position = r.real("initial_position", 0.0);
  c.perturbation = non_negative(r, "perturbation", 0.0);
  c.seed = static_cast<std::uint64_t>(count(r, "seed", 1, 0));
  c.sample_interval = non_negative(r, "sample_interval", 0.0);
  c.snapshot_stride = count(r, "snapshot_stride", 0, 0);
  c.recenter = r.boolean("recenter", true);
  c.residuals = r.boolean("residuals", false);
  const double slope_limit = non_negative(r, "jumps.slope_limit", 0.0);
  const auto jump_merge = count(r, "jumps.merge", 20, 1);
  const double jump_settle = non_negative(r, "jumps.settle", 0.05);
  if (pot) c.potential = *pot;
  run.start(r);

  const auto res = simulate_1d(c);
  auto w = run.csv("track.csv", "track");
  for (std::size_t i = 0; i < res.track.t.size(); ++i)
    w.row({res.track.t[i], res.track.x[i], res.track.V_est[i], res.track.F[i]});
  w.close();
  write_snapshots_1d(run, res.snapshots);
  if (c.residuals) {
    std::vector<Row> rows;
    for (const auto& d : res.residuals) rows.push_back({d.t, d.u_norm_L2});
    run.table("residuals.csv", "residuals", rows);
  }
  if (slope_limit > 0.0) {
    std::vector<Row> rows;
    for (const auto& j : detect_jumps(res.track, slope_limit, jump_merge, jump_settle))
      rows.push_back({j.t, j.F, j.V_before, j.V_after});
    run.table("jumps.csv", "jumps", rows);
    run.result("jumps", rows.size());
  }
  const auto& t = res.track.t;
  const auto& x = res.track.x;
  if (t.size() >= 2) run.result("mean_velocity", (x.back() - x[t.size() / 2]) / (t.back() - t[t.size() / 2]));
  run.result("dt", res.dt);
  run.result("steps", res.steps);
  run.result("bound_violations", res.bound_violations);
}

void exp_cell1d(ParamReader& r, Run& run) {
  CellConfig c;
  const auto pot = read_potential(r, "asymmetric-sextic");
  c.eps = positive(r, "eps", 0.02);
  c.beta = non_negative(r, "beta", 0.0);
  c.half_width = non_negative(r, "half_width", 0.0);
  c.half_length = non_negative(r, "half_length", 0.0);
  c.cells_per_eps = static_cast<int>(count(r, "cells_per_eps", 8, 8));
  c.t_end = positive(r, "t_end", 1.0);
  c.sample_interval = non_negative(r, "sample_interval", 0.0);
  c.snapshot_stride = count(r, "snapshot_stride", 0, 0);
  c.recenter = r.boolean("recenter", true);
  if (pot) c.potential = *pot;
  run.start(r);

  const auto res = simulate_two_interface_cell(c);
  auto w = run.csv("cell_track.csv", "cell_track");
  for (const auto& s : res.samples) w.row({s.t, s.x_back, s.x_front, s.mass, s.lambda});
  w.close();
  write_snapshots_1d(run, res.snapshots);
  run.result("velocity", res.velocity);
  run.result("width_drift", res.width_drift);
  run.result("mass_drift", res.mass_drift);
  run.result("bound_violations", res.bound_violations);
}

void exp_pde2d(ParamReader& r, Run& run) {
  Pde2dConfig c;
  const auto pot = read_potential(r, "symmetric-quartic");
  c.eps = r.real("eps", c.eps);
  c.beta = r.real("beta", c.beta);
  c.nx = count(r, "nx", static_cast<std::int64_t>(c.nx), 0);
  c.ny = count(r, "ny", static_cast<std::int64_t>(c.ny), 0);
  c.length_x = r.real("length_x", c.length_x);
  c.length_y = r.real("length_y", c.length_y);
  c.radius = r.real("radius", c.radius);
  c.center_x = r.real("center_x", c.center_x);
  c.center_y = r.real("center_y", c.center_y);
  c.t_end = r.real("t_end", c.t_end);
  c.contour_stride = count(r, "contour_stride", static_cast<std::int64_t>(c.contour_stride), 0);
  c.snapshot_stride = count(r, "snapshot_stride", 0, 0);
  if (pot) c.potential = *pot;
  try {
    validate_pde2d(c);
  } catch (const std::invalid_argument& e) {
    r.reject("pde2d", e.what());
  }
  run.start(r);

  const auto res = simulate_2d(c);
  auto m = run.csv("monitors.csv", "monitors");
  for (const auto& s : res.monitors) m.row({s.t, s.mass, s.E, s.F, s.rho_min, s.rho_max, s.lambda});
  m.close();
  auto w = run.csv("contours.csv", "contours");
  for (const auto& [t, contour] : res.contours)
    for (std::size_t k = 0; k < contour.points.size(); ++k)
      w.row({t, static_cast<std::int64_t>(k), contour.points[k][0], contour.points[k][1]});
  w.close();
  if (!res.snapshots.empty()) {
    std::vector<Row> index;
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/field_%06zu.bin", k);
      write_field_snapshot(run.report.output_dir / name, res.snapshots[k]);
      run.report.files.push_back(name);
      index.push_back({static_cast<std::int64_t>(k), res.snapshots[k].t});
    }
    run.table("snapshot_index.csv", "snapshot_index", index);
  }
  const auto& first = res.monitors.front();
  const auto& last = res.monitors.back();
  run.result("mass_drift", std::abs(last.mass - first.mass) / first.mass);
  run.result("energy_initial", first.E + first.F);
  run.result("energy_final", last.E + last.F);
  run.result("band_violations", res.band_violations);
  run.result("steps", res.steps);
}

void exp_sil2d(ParamReader& r, Run& run) {
  const auto pot = read_potential(r, "symmetric-quartic");
  const auto ps = read_profile(r, kDefaultProfilePoints);
  const double beta = non_negative(r, "beta", 0.0);
  const auto shape = r.choice("curve.shape", "ellipse", {"circle", "ellipse"});
  const double cx = r.real("curve.center_x", 0.5);
  const double cy = r.real("curve.center_y", 0.5);
  double a = 0.0, b = 0.0;
  if (shape == "circle") {
    a = b = positive(r, "curve.radius", 0.25);
  } else {
    a = positive(r, "curve.a", 0.3);
    b = positive(r, "curve.b", 0.2);
  }
  const auto nodes = count(r, "curve.nodes", 128, 16);
  const double dt_in = non_negative(r, "dt", 0.0);
  const double t_end = positive(r, "t_end", 0.05);
  EvolveOptions eo;
  eo.record_every = count(r, "record_every", 10, 1);
  eo.resample = r.boolean("resample", true);
  eo.nodal.capture_radius = positive(r, "nodal.capture_radius", 0.2);
  eo.nodal.tol = positive(r, "nodal.tol", 1e-10);
  const double half_range = positive(r, "phi.half_range", 10.0);
  const auto phi_nodes = count(r, "phi.nodes", 401, 5);
  if (phi_nodes % 2 == 0) r.reject("phi.nodes", "must be odd");
  run.start(r);

  const auto profile = standing_wave(*pot, ps.half_width, ps.points);
  PhiTable phi(beta, profile, half_range, phi_nodes);
  const auto curve = shape == "circle" ? make_circle(cx, cy, a, nodes) : make_ellipse(cx, cy, a, b, nodes);
  const double ds = perimeter(curve) / static_cast<double>(nodes);
  const double dt = dt_in > 0.0 ? dt_in : 0.2 * ds * ds;
  const auto res = evolve_curve(curve, dt, t_end, phi, eo);
  auto w = run.csv("curve.csv", "curve");
  for (const auto& s : res.samples)
    for (std::size_t k = 0; k < s.nodes.size(); ++k)
      w.row({s.t, static_cast<std::int64_t>(k), s.nodes[k][0], s.nodes[k][1], s.V[k], s.kappa[k], s.lambda});
  w.close();
  const double A0 = res.samples.front().area;
  double drift = 0.0;
  for (const auto& s : res.samples) drift = std::max(drift, std::abs(s.area - A0) / A0);
  run.result("area_drift", drift);
  run.result("dt", dt);
  run.result("steps", res.steps);
  run.result("ambiguous_events", res.ambiguous_events);
  run.result("max_residual", res.max_residual);
  run.result("max_flux", res.max_flux);
}

using Runner = void (*)(ParamReader&, Run&);

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"sil-roots", exp_sil_roots}, {"tw", exp_tw},         {"beta-crit", exp_beta_crit},
      {"hysteresis", exp_hysteresis}, {"stability", exp_stability}, {"pde1d", exp_pde1d},
      {"cell1d", exp_cell1d},       {"pde2d", exp_pde2d},   {"sil2d", exp_sil2d},
      {"kernel", exp_kernel},
  };
  return r;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) c = '_';
  return s;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : runners()) n.push_back(k);
    return n;
  }();
  return names;
}

std::filesystem::path default_output_root() {
  const char* env = std::getenv("MOTILITY_OUTPUT_ROOT");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

RunReport run_experiment(const Config& config, const RunOptions& options) {
  ParamReader r(config);
  std::string name = options.experiment;
  if (const auto in_file = config.find("experiment")) {
    if (name.empty()) name = *in_file;
    else if (*in_file != name)
      throw ConfigError({"experiment: config says '" + *in_file + "' but the subcommand is '" + name + "'"});
  }
  if (name.empty()) throw ConfigError({"experiment: required"});
  const auto it = std::find_if(runners().begin(), runners().end(), [&](const auto& p) { return p.first == name; });
  if (it == runners().end()) throw ConfigError({"experiment: unknown experiment '" + name + "'"});
  r.text("experiment", name);

  std::filesystem::path dir;
  if (options.output_dir) {
    r.accept("output_dir");
    dir = *options.output_dir;
  } else {
    dir = r.text("output_dir", (default_output_root() / name).string());
  }

  Run run(name, dir, options.threads);
  try {
    it->second(r, run);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    if (run.started()) run.manifest("failed", e.what());
    throw std::runtime_error(name + ": " + e.what());
  }
  run.report.files.push_back("manifest.txt");
  run.manifest("ok");
  return run.report;
}

RunReport run_experiment_file(const std::filesystem::path& config_path, const RunOptions& options) {
  return run_experiment(Config::load(config_path), options);
}

std::vector<SweepItem> run_sweep(const std::filesystem::path& sweep_path, const RunOptions& options) {
  const auto sweep = Config::load(sweep_path);
  ParamReader r(sweep);
  const auto base_dir = sweep_path.parent_path();
  if (const auto e = sweep.find("experiment"); e && *e != "sweep")
    r.reject("experiment", "a sweep file must say experiment = sweep");
  r.accept("experiment");
  const auto root = options.output_dir ? *options.output_dir
                                       : std::filesystem::path(r.text("output_dir", (default_output_root() / "sweep").string()));
  if (options.output_dir) r.accept("output_dir");

  struct Job {
    Config config;
    std::filesystem::path dir;
  };
  std::vector<Job> jobs;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
  };
  const bool by_value = sweep.has("sweep.base") || sweep.has("sweep.key") || sweep.has("sweep.values");
  if (by_value) {
    const auto base = r.required("sweep.base");
    const auto key = r.required("sweep.key");
    const auto values = r.required("sweep.values");
    r.accept("sweep.configs");
    if (sweep.has("sweep.configs")) r.reject("sweep.configs", "cannot be combined with sweep.base");
    r.finish();
    const auto base_cfg = Config::load(base_dir / *base);
    for (const auto& v : split(*values)) {
      Job j{base_cfg, root / sanitize(*key + "-" + v)};
      j.config.set(*key, v);
      jobs.push_back(std::move(j));
    }
  } else {
    const auto list = r.required("sweep.configs");
    r.finish();
    for (const auto& p : split(*list)) {
      const std::filesystem::path path = base_dir / p;
      jobs.push_back({Config::load(path), root / sanitize(path.stem().string())});
    }
  }
  if (jobs.empty()) throw ConfigError({"sweep: no jobs"});

  std::vector<SweepItem> items(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t k) {
    items[k].output_dir = jobs[k].dir;
    RunOptions o;
    o.output_dir = jobs[k].dir;
    try {
      items[k].report = run_experiment(jobs[k].config, o);
      items[k].ok = true;
    } catch (const std::exception& e) {
      items[k].error = e.what();
    }
  });
  return items;
}

}  // namespace motility::io
