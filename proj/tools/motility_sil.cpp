// motility-sil <subcommand> --config <path> [--out <dir>] [--threads N]

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "motility/io/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRunError = 1;

void print_report(const motility::io::RunReport& r) {
  std::cout << r.experiment << ": " << r.output_dir.string() << "\n";
  for (const auto& [k, v] : r.results) std::cout << "  " << k << " = " << v << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field cell motility: sharp-interface and phase-field experiments"};
  app.set_version_flag("--version", std::string(MOTILITY_VERSION));
  app.require_subcommand(1);

  std::string config;
  std::string out;
  unsigned threads = 1;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (default: $MOTILITY_OUTPUT_ROOT/<name> or runs/<name>)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  };

  const std::pair<const char*, const char*> subs[] = {
      {"sil-roots", "roots of c0 V = Phi_beta(V) - F with stability labels"},
      {"tw", "traveling-wave velocities of the two-interface cell"},
      {"beta-crit", "critical beta for nonzero traveling waves"},
      {"hysteresis", "quasi-static sweep of the forcing across folds"},
      {"stability", "spectral stability map over V and beta"},
      {"pde1d", "1D phase-field interface under forcing"},
      {"cell1d", "1D two-interface cell"},
      {"pde2d", "2D phase-field cell"},
      {"sil2d", "closed-curve sharp-interface evolution"},
      {"kernel", "standing wave, kernel solution and Phi table"},
      {"sweep", "run a family of configs on a worker pool"},
  };
  for (const auto& [name, help] : subs) common(app.add_subcommand(name, help));

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  motility::io::RunOptions opts;
  if (!out.empty()) opts.output_dir = out;
  opts.threads = threads;
  try {
    if (name == "sweep") {
      int failed = 0;
      for (const auto& item : motility::io::run_sweep(config, opts)) {
        if (item.ok) {
          print_report(item.report);
        } else {
          ++failed;
          std::cerr << "failed: " << item.output_dir.string() << ": " << item.error << "\n";
        }
      }
      return failed ? kRunError : 0;
    }
    opts.experiment = name;
    print_report(motility::io::run_experiment_file(config, opts));
  } catch (const motility::io::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunError;
  }
  return 0;
}
