// cesec: constant-envelope secure-transmission simulator.
//
//   cesec sweep <config> [--seed N] [--trials N] [--out PATH] [--plot PATH] [--workers N]
//   cesec closed-form --n-t N --snr-db X
//   cesec check [--quick] [--artifacts DIR]
//
// Exit codes: 0 success, 1 configuration/usage error, 2 some sweep cells or
// checks failed.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "cesec/harness.h"
#include "cesec/verify/acceptance.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

int run_sweep_command(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                      const std::optional<std::uint64_t>& trials,
                      const std::optional<std::string>& out,
                      const std::optional<std::string>& plot,
                      const std::optional<unsigned>& workers) {
  cesec::SweepConfig cfg;
  try {
    cfg = cesec::load_config(config_path);
    if (seed) cfg.master_seed = *seed;
    if (trials) cfg.trials = *trials;
    if (out) cfg.output_path = *out;
    if (workers) cfg.workers = *workers;
    cfg.validate();
  } catch (const cesec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const cesec::SweepOutcome outcome = cesec::run_sweep(cfg);
  for (const auto& f : outcome.failures) {
    std::cerr << "cell failed: scheme=" << cesec::scheme_tag(f.scheme) << " n_t=" << f.n_t
              << " snr_db=" << cesec::format_number(f.snr_db) << ": " << f.message << '\n';
  }
  if (outcome.rows.empty()) {
    std::cerr << "no cells succeeded; nothing written\n";
    return kExitPartial;
  }
  try {
    cesec::emit_csv(outcome.rows, cfg.output_path);
    std::filesystem::path plot_path =
        plot ? std::filesystem::path(*plot)
             : std::filesystem::path(cfg.output_path).replace_extension(".gp");
    cesec::emit_plot_script(outcome.rows, plot_path);
    std::cout << "wrote " << outcome.rows.size() << " rows to " << cfg.output_path
              << " and plot script " << plot_path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitPartial;
  }
  return outcome.failures.empty() ? kExitOk : kExitPartial;
}

int run_closed_form(std::size_t n_t, double snr_db) {
  const auto p = cesec::SystemParams::from_snr_db(snr_db, n_t);
  std::printf("n_t=%zu snr_db=%s\n", n_t, cesec::format_number(snr_db).c_str());
  std::printf("c_mf          %s\n", cesec::format_number(cesec::c_mf(p).value).c_str());
  std::printf("c_eve         %s\n", cesec::format_number(cesec::c_eve_closed(p).value).c_str());
  std::printf("c_sec_mf      %s\n", cesec::format_number(cesec::c_sec_mf(p).value).c_str());
  std::printf("c_sec_mf_sum  %s\n", cesec::format_number(cesec::c_sec_mf_partial_sum(p)).c_str());
  return kExitOk;
}

int run_check(bool quick, const std::string& artifacts) {
  cesec::verify::AcceptanceOptions opts;
  opts.quick = quick;
  opts.artifact_dir = artifacts;
  bool all = true;
  for (const auto& r : cesec::verify::run_acceptance(opts)) {
    std::cout << cesec::verify::format_result(r) << std::endl;
    all = all && r.passed;
  }
  return all ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constant-envelope precoding with artificial noise: secrecy-rate simulator"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "Run a seeded secrecy-rate sweep from a config file");
  std::string config_path;
  std::optional<std::uint64_t> seed, trials;
  std::optional<std::string> out, plot;
  std::optional<unsigned> workers;
  sweep->add_option("config", config_path, "Sweep configuration file")->required();
  sweep->add_option("--seed", seed, "Override the master seed");
  sweep->add_option("--trials", trials, "Override Monte-Carlo trials per cell");
  sweep->add_option("--out", out, "Override the CSV output path");
  sweep->add_option("--plot", plot, "Plot script path (default: CSV path with .gp)");
  sweep->add_option("--workers", workers, "Worker threads (default: CESEC_WORKERS or automatic)");

  auto* closed = app.add_subcommand("closed-form", "Print MF closed-form rates");
  std::size_t n_t = 100;
  double snr_db = 10.0;
  closed->add_option("--n-t", n_t, "Antenna count")->required()->check(CLI::PositiveNumber);
  closed->add_option("--snr-db", snr_db, "P_T / sigma^2 in dB")->required();

  auto* check = app.add_subcommand("check", "Run the invariant and acceptance suite");
  bool quick = false;
  std::string artifacts = "check_artifacts";
  check->add_flag("--quick", quick, "Reduced trial counts");
  check->add_option("--artifacts", artifacts, "Directory for sweep CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*sweep) return run_sweep_command(config_path, seed, trials, out, plot, workers);
  if (*closed) return run_closed_form(n_t, snr_db);
  if (*check) return run_check(quick, artifacts);
  return kExitConfig;
}
