#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cesec/capacity.h"

namespace cesec {

enum class Scheme { kMf, kCe, kMfAn, kCeScheme1, kCeScheme2 };

/// Tags in canonical (sort) order.
const std::vector<Scheme>& all_schemes();
std::string_view scheme_tag(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view tag);
std::string_view scheme_label(Scheme s);

/// Parse or validation failure in a sweep configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  std::vector<double> snr_db_grid;
  std::vector<std::size_t> n_t_grid{100};
  std::vector<Scheme> schemes;
  std::uint64_t trials = 1000;
  std::uint64_t master_seed = 0;
  double eta = 0.5;  // sets the invisible-AN power target
  std::vector<double> eta_grid = default_eta_grid();
  std::optional<double> an_power_target;  // overrides the eta-derived target
  Scheme1Options scheme1;
  AnEstimatorOptions an;
  std::string output_path = "results.csv";
  unsigned workers = 0;  // 0 = CESEC_WORKERS or automatic

  SweepConfig();
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Reads a key = value file with optional [section] blocks:
///
///   schemes = mf, ce, mf_an, ce_scheme1, ce_scheme2
///   snr_db  = -10:5:40          # start:step:stop or a comma list
///   n_t     = 100
///   trials  = 1000
///   seed    = 0
///   eta     = 0.5
///   output  = results.csv
///   [precoder]    tolerance, max_sweeps, symbol_radius
///   [mf_an]       eta_grid
///   [ce_scheme1]  an_power_target, penalty_weight, tolerance, max_iters, restarts
///   [ce_scheme2]  cancel_gain_floor, eve_bound (upper|lower),
///                 leakage_phase (an|signal), an_enabled
///
/// Unset fields take the defaults above. Throws ConfigError.
SweepConfig load_config(const std::filesystem::path& path);
SweepConfig parse_config(std::string_view text, std::string_view origin = "<config>");

struct ResultRow {
  Scheme scheme = Scheme::kMf;
  std::size_t n_t = 0;
  double snr_db = 0.0;
  double secrecy_bits = 0.0;
  double user_bits = 0.0;
  double eve_bits = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::string flags = "none";  // key=value pairs joined by ';'

  bool operator==(const ResultRow&) const = default;
};

struct CellFailure {
  Scheme scheme;
  std::size_t n_t;
  double snr_db;
  std::string message;
};

struct SweepOutcome {
  std::vector<ResultRow> rows;  // sorted by (scheme, n_t, snr_db)
  std::vector<CellFailure> failures;
};

/// Seed of one (scheme, n_t, snr) cell. Depends on the SNR value rather than
/// its grid position, so editing the grid leaves other cells untouched.
std::uint64_t cell_seed(std::uint64_t master_seed, Scheme s, std::size_t n_t, double snr_db);

/// Evaluates one cell. Estimator errors propagate as exceptions.
ResultRow run_cell(const SweepConfig& cfg, Scheme s, std::size_t n_t, double snr_db);

/// Runs every cell on a bounded worker pool; a failing cell is recorded and
/// the remaining cells still run.
SweepOutcome run_sweep(const SweepConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "scheme,n_t,snr_db,secrecy_bits,user_bits,eve_bits,std_error,trials,flags";

/// Nine significant digits, C locale.
std::string format_number(double x);
/// Rounds to the value that format_number prints, so rows survive a CSV
/// round trip unchanged.
double quantize(double x);

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(std::string_view text);
/// Throws std::invalid_argument for empty rows, std::runtime_error on I/O.
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

/// Self-contained gnuplot script drawing secrecy_bits against snr_db, one
/// curve per (scheme, n_t). The image is written next to the script.
std::string format_plot_script(const std::vector<ResultRow>& rows, std::string_view image_name);
void emit_plot_script(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

}  // namespace cesec
