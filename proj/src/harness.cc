#include "cesec/harness.h"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cesec/parallel.h"

namespace cesec {

namespace pt = boost::property_tree;

namespace {

struct SchemeInfo {
  Scheme scheme;
  std::string_view tag;
  std::string_view label;
};

constexpr SchemeInfo kSchemes[] = {
    {Scheme::kMf, "mf", "MF without AN"},
    {Scheme::kCe, "ce", "CE without AN"},
    {Scheme::kMfAn, "mf_an", "MF with AN"},
    {Scheme::kCeScheme1, "ce_scheme1", "CE + invisible AN (Scheme I)"},
    {Scheme::kCeScheme2, "ce_scheme2", "CE + random AN + cancellation (Scheme II)"},
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Drops "# ..." and "; ..." tails that follow whitespace. Whole-line comments
// are left to the INI reader.
std::string strip_inline_comments(std::string_view text) {
  std::string out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == '#' || line[i] == ';') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.resize(i);
        break;
      }
    }
    out += line;
    out += '\n';
  }
  return out;
}

std::vector<std::string> split_list(std::string_view raw) {
  std::string s = trim(raw);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

[[noreturn]] void field_error(std::string_view origin, std::string_view field,
                              const std::string& what) {
  throw ConfigError(std::string(origin) + ": field '" + std::string(field) + "': " + what);
}

double to_double(std::string_view origin, std::string_view field, const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    field_error(origin, field, "expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(std::string_view origin, std::string_view field, const std::string& s) {
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    field_error(origin, field, "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(std::string_view origin, std::string_view field, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  field_error(origin, field, "expected true/false, got '" + s + "'");
}

// "a:step:b" (inclusive) or a comma list.
std::vector<double> to_real_grid(std::string_view origin, std::string_view field,
                                 const std::string& raw) {
  const std::string s = trim(raw);
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string p;
    while (std::getline(in, p, ':')) parts.push_back(trim(p));
    if (parts.size() != 3) field_error(origin, field, "range must be start:step:stop");
    const double start = to_double(origin, field, parts[0]);
    const double step = to_double(origin, field, parts[1]);
    const double stop = to_double(origin, field, parts[2]);
    if (!(step > 0.0) || stop < start) field_error(origin, field, "range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid;
    for (long k = 0; k < count; ++k) grid.push_back(start + static_cast<double>(k) * step);
    return grid;
  }
  std::vector<double> grid;
  for (const auto& item : split_list(s)) grid.push_back(to_double(origin, field, item));
  return grid;
}

void check_keys(std::string_view origin, const std::string& section, const pt::ptree& tree,
                const std::set<std::string>& allowed) {
  for (const auto& [key, child] : tree) {
    if (!child.empty()) continue;  // subsection
    if (!allowed.contains(key)) {
      const std::string where = section.empty() ? key : section + "." + key;
      field_error(origin, where, "unknown key");
    }
  }
}

std::string format_flags(const std::vector<std::pair<std::string, double>>& kv) {
  if (kv.empty()) return "none";
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k + "=" + format_number(v);
  }
  return out;
}

}  // namespace

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> schemes = [] {
    std::vector<Scheme> v;
    for (const auto& s : kSchemes) v.push_back(s.scheme);
    return v;
  }();
  return schemes;
}

std::string_view scheme_tag(Scheme s) {
  for (const auto& info : kSchemes) {
    if (info.scheme == s) return info.tag;
  }
  return "unknown";
}

std::string_view scheme_label(Scheme s) {
  for (const auto& info : kSchemes) {
    if (info.scheme == s) return info.label;
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view tag) {
  for (const auto& info : kSchemes) {
    if (info.tag == tag) return info.scheme;
  }
  return std::nullopt;
}

SweepConfig::SweepConfig() {
  for (int k = 0; k <= 10; ++k) snr_db_grid.push_back(-10.0 + 5.0 * k);
}

void SweepConfig::validate() const {
  auto bad = [](std::string_view field, const std::string& what) {
    throw ConfigError("config: field '" + std::string(field) + "': " + what);
  };
  if (schemes.empty()) bad("schemes", "must list at least one scheme");
  if (snr_db_grid.empty()) bad("snr_db", "grid must not be empty");
  if (n_t_grid.empty()) bad("n_t", "grid must not be empty");
  for (auto n : n_t_grid) {
    if (n < 1) bad("n_t", "antenna counts must be >= 1");
  }
  if (trials < 1) bad("trials", "must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) bad("eta", "must be in (0, 1]");
  if (eta_grid.empty()) bad("mf_an.eta_grid", "grid must not be empty");
  for (double e : eta_grid) {
    if (!(e >= 0.0 && e <= 1.0)) bad("mf_an.eta_grid", "values must be in [0, 1]");
  }
  const bool uses_scheme1 = std::find(schemes.begin(), schemes.end(), Scheme::kCeScheme1) != schemes.end();
  const bool uses_mf_an = std::find(schemes.begin(), schemes.end(), Scheme::kMfAn) != schemes.end();
  for (auto n : n_t_grid) {
    if (uses_scheme1 && n < 3) bad("n_t", "ce_scheme1 needs n_t >= 3");
    if (uses_mf_an && n < 2) bad("n_t", "mf_an needs n_t >= 2");
    if (uses_scheme1) {
      const double target =
          an_power_target.value_or(Scheme1Options::target_from_eta(eta, n));
      if (target < 0.0 || target > 4.0 * static_cast<double>(n)) {
        bad(an_power_target ? "ce_scheme1.an_power_target" : "eta",
            "AN power target " + format_number(target) + " exceeds 4 n_t = " +
                std::to_string(4 * n) + " (eta must be >= 0.2)");
      }
    }
  }
  if (!(scheme1.tolerance > 0.0)) bad("ce_scheme1.tolerance", "must be > 0");
  if (scheme1.max_iters < 1) bad("ce_scheme1.max_iters", "must be >= 1");
  if (scheme1.restarts < 0) bad("ce_scheme1.restarts", "must be >= 0");
  if (scheme1.penalty_weight && !(*scheme1.penalty_weight > 0.0)) bad("ce_scheme1.penalty_weight", "must be > 0");
  if (!(an.symbol_radius >= 0.0 && an.symbol_radius <= 1.0)) bad("precoder.symbol_radius", "must be in [0, 1]");
  if (!(an.precoder.tolerance > 0.0)) bad("precoder.tolerance", "must be > 0");
  if (an.precoder.max_sweeps < 1) bad("precoder.max_sweeps", "must be >= 1");
  if (!(an.scheme2.cancel_gain_floor >= 0.0)) bad("ce_scheme2.cancel_gain_floor", "must be >= 0");
}

SweepConfig parse_config(std::string_view text, std::string_view origin) {
  pt::ptree tree;
  try {
    std::istringstream in{strip_inline_comments(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string(origin) + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  static const std::set<std::string> kTop = {"schemes", "snr_db", "n_t",    "trials",
                                             "seed",    "eta",    "output", "workers"};
  static const std::set<std::string> kSections = {"precoder", "mf_an", "ce_scheme1", "ce_scheme2"};
  check_keys(origin, "", tree, kTop);
  for (const auto& [key, child] : tree) {
    if (!child.empty() && !kSections.contains(key)) field_error(origin, key, "unknown section");
  }

  SweepConfig cfg;
  auto get = [&](const std::string& path) { return tree.get_optional<std::string>(path); };

  if (auto v = get("schemes")) {
    for (const auto& tag : split_list(*v)) {
      auto s = parse_scheme(tag);
      if (!s) {
        std::string valid;
        for (const auto& info : kSchemes) valid += (valid.empty() ? "" : ", ") + std::string(info.tag);
        field_error(origin, "schemes", "unknown scheme '" + tag + "' (valid: " + valid + ")");
      }
      if (std::find(cfg.schemes.begin(), cfg.schemes.end(), *s) == cfg.schemes.end()) {
        cfg.schemes.push_back(*s);
      }
    }
  }
  if (auto v = get("snr_db")) cfg.snr_db_grid = to_real_grid(origin, "snr_db", *v);
  if (auto v = get("n_t")) {
    cfg.n_t_grid.clear();
    for (const auto& item : split_list(*v)) cfg.n_t_grid.push_back(to_u64(origin, "n_t", item));
  }
  if (auto v = get("trials")) cfg.trials = to_u64(origin, "trials", trim(*v));
  if (auto v = get("seed")) cfg.master_seed = to_u64(origin, "seed", trim(*v));
  if (auto v = get("eta")) cfg.eta = to_double(origin, "eta", trim(*v));
  if (auto v = get("output")) cfg.output_path = trim(*v);
  if (auto v = get("workers")) cfg.workers = static_cast<unsigned>(to_u64(origin, "workers", trim(*v)));

  if (auto sec = tree.get_child_optional("precoder")) {
    check_keys(origin, "precoder", *sec, {"tolerance", "max_sweeps", "symbol_radius"});
    if (auto v = sec->get_optional<std::string>("tolerance"))
      cfg.an.precoder.tolerance = to_double(origin, "precoder.tolerance", trim(*v));
    if (auto v = sec->get_optional<std::string>("max_sweeps"))
      cfg.an.precoder.max_sweeps = static_cast<int>(to_u64(origin, "precoder.max_sweeps", trim(*v)));
    if (auto v = sec->get_optional<std::string>("symbol_radius"))
      cfg.an.symbol_radius = to_double(origin, "precoder.symbol_radius", trim(*v));
  }
  if (auto sec = tree.get_child_optional("mf_an")) {
    check_keys(origin, "mf_an", *sec, {"eta_grid"});
    if (auto v = sec->get_optional<std::string>("eta_grid"))
      cfg.eta_grid = to_real_grid(origin, "mf_an.eta_grid", *v);
  }
  if (auto sec = tree.get_child_optional("ce_scheme1")) {
    check_keys(origin, "ce_scheme1", *sec,
               {"an_power_target", "penalty_weight", "tolerance", "max_iters", "restarts"});
    if (auto v = sec->get_optional<std::string>("an_power_target"))
      cfg.an_power_target = to_double(origin, "ce_scheme1.an_power_target", trim(*v));
    if (auto v = sec->get_optional<std::string>("penalty_weight"))
      cfg.scheme1.penalty_weight = to_double(origin, "ce_scheme1.penalty_weight", trim(*v));
    if (auto v = sec->get_optional<std::string>("tolerance"))
      cfg.scheme1.tolerance = to_double(origin, "ce_scheme1.tolerance", trim(*v));
    if (auto v = sec->get_optional<std::string>("max_iters"))
      cfg.scheme1.max_iters = static_cast<int>(to_u64(origin, "ce_scheme1.max_iters", trim(*v)));
    if (auto v = sec->get_optional<std::string>("restarts"))
      cfg.scheme1.restarts = static_cast<int>(to_u64(origin, "ce_scheme1.restarts", trim(*v)));
  }
  if (auto sec = tree.get_child_optional("ce_scheme2")) {
    check_keys(origin, "ce_scheme2", *sec,
               {"cancel_gain_floor", "eve_bound", "leakage_phase", "an_enabled"});
    if (auto v = sec->get_optional<std::string>("cancel_gain_floor"))
      cfg.an.scheme2.cancel_gain_floor = to_double(origin, "ce_scheme2.cancel_gain_floor", trim(*v));
    if (auto v = sec->get_optional<std::string>("eve_bound")) {
      const auto s = trim(*v);
      if (s == "upper") cfg.an.bound = EveBound::kUpper;
      else if (s == "lower") cfg.an.bound = EveBound::kLower;
      else field_error(origin, "ce_scheme2.eve_bound", "expected upper or lower, got '" + s + "'");
    }
    if (auto v = sec->get_optional<std::string>("leakage_phase")) {
      const auto s = trim(*v);
      if (s == "an") cfg.an.leakage_phase = LeakagePhase::kAnPhase;
      else if (s == "signal") cfg.an.leakage_phase = LeakagePhase::kSignalPhase;
      else field_error(origin, "ce_scheme2.leakage_phase", "expected an or signal, got '" + s + "'");
    }
    if (auto v = sec->get_optional<std::string>("an_enabled"))
      cfg.an.an_enabled = to_bool(origin, "ce_scheme2.an_enabled", trim(*v));
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(origin) + ": " + e.what());
  }
  return cfg;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::uint64_t cell_seed(std::uint64_t master_seed, Scheme s, std::size_t n_t, double snr_db) {
  // FNV-1a over the tag, then SplitMix64 chaining.
  std::uint64_t tag_hash = 0xCBF29CE484222325ULL;
  for (char c : scheme_tag(s)) {
    tag_hash ^= static_cast<unsigned char>(c);
    tag_hash *= 0x100000001B3ULL;
  }
  std::uint64_t snr_bits = 0;
  const double normalized = snr_db == 0.0 ? 0.0 : snr_db;  // fold -0.0
  std::memcpy(&snr_bits, &normalized, sizeof snr_bits);
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ tag_hash);
  h = mix64(h ^ static_cast<std::uint64_t>(n_t));
  h = mix64(h ^ snr_bits);
  return h;
}

ResultRow run_cell(const SweepConfig& cfg, Scheme s, std::size_t n_t, double snr_db) {
  const SystemParams p = SystemParams::from_snr_db(snr_db, n_t, cfg.eta);
  const MonteCarlo mc{cfg.trials, cell_seed(cfg.master_seed, s, n_t, snr_db), 1};

  ResultRow row;
  row.scheme = s;
  row.n_t = n_t;
  row.snr_db = snr_db;
  std::vector<std::pair<std::string, double>> flags;

  SecrecyReport report;
  switch (s) {
    case Scheme::kMf:
      report.user = c_mf(p);
      report.eve = c_mf_eve(p);
      report.secrecy = c_sec_mf(p);
      break;
    case Scheme::kCe:
      report = c_sec_ce(p, mc);
      break;
    case Scheme::kMfAn:
      report = secrecy_mf_an_opt(p, cfg.eta_grid, mc);
      flags.emplace_back("best_eta", *report.best_eta);
      break;
    case Scheme::kCeScheme1: {
      Scheme1Options opts = cfg.scheme1;
      opts.an_power_target =
          cfg.an_power_target.value_or(Scheme1Options::target_from_eta(cfg.eta, n_t));
      report = secrecy_scheme1_mc(p, opts, mc, cfg.an);
      flags.emplace_back("an_power_target", opts.an_power_target);
      flags.emplace_back("solver_fail", report.solver_failure_rate);
      flags.emplace_back("trivial_secrecy", report.trivial_secrecy->value);
      break;
    }
    case Scheme::kCeScheme2:
      report = secrecy_scheme2_mc(p, mc, cfg.an);
      flags.emplace_back("low_h0", report.low_cancel_gain_rate);
      flags.emplace_back("cancel_power", report.mean_cancel_power);
      break;
  }

  row.secrecy_bits = quantize(report.secrecy.value);
  row.user_bits = quantize(report.user.value);
  row.eve_bits = quantize(report.eve.value);
  row.std_error = quantize(report.secrecy.std_error);
  row.trials = report.secrecy.trials;
  row.flags = format_flags(flags);
  return row;
}

SweepOutcome run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  struct Cell {
    Scheme scheme;
    std::size_t n_t;
    double snr_db;
  };
  std::vector<Cell> cells;
  for (Scheme s : all_schemes()) {
    if (std::find(cfg.schemes.begin(), cfg.schemes.end(), s) == cfg.schemes.end()) continue;
    std::vector<std::size_t> nts = cfg.n_t_grid;
    std::sort(nts.begin(), nts.end());
    nts.erase(std::unique(nts.begin(), nts.end()), nts.end());
    std::vector<double> snrs = cfg.snr_db_grid;
    std::sort(snrs.begin(), snrs.end());
    snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());
    for (auto n : nts) {
      for (double snr : snrs) cells.push_back({s, n, snr});
    }
  }

  std::vector<std::optional<ResultRow>> rows(cells.size());
  std::vector<std::optional<std::string>> errors(cells.size());
  parallel_for(cells.size(), cfg.workers, [&](std::size_t i) {
    try {
      rows[i] = run_cell(cfg, cells[i].scheme, cells[i].n_t, cells[i].snr_db);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  SweepOutcome out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (rows[i]) out.rows.push_back(std::move(*rows[i]));
    if (errors[i]) out.failures.push_back({cells[i].scheme, cells[i].n_t, cells[i].snr_db, *errors[i]});
  }
  return out;
}

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, ptr);
}

double quantize(double x) {
  const std::string s = format_number(x);
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += scheme_tag(r.scheme);
    out += ',' + std::to_string(r.n_t);
    out += ',' + format_number(r.snr_db);
    out += ',' + format_number(r.secrecy_bits);
    out += ',' + format_number(r.user_bits);
    out += ',' + format_number(r.eve_bits);
    out += ',' + format_number(r.std_error);
    out += ',' + std::to_string(r.trials);
    out += ',' + r.flags;
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw std::runtime_error("parse_csv: missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::istringstream fields(line);
    std::string item;
    while (std::getline(fields, item, ',')) f.push_back(item);
    if (f.size() != 9) {
      throw std::runtime_error("parse_csv: line " + std::to_string(line_no) + ": expected 9 fields");
    }
    const std::string origin = "csv line " + std::to_string(line_no);
    auto s = parse_scheme(f[0]);
    if (!s) throw std::runtime_error(origin + ": unknown scheme '" + f[0] + "'");
    ResultRow r;
    try {
      r.scheme = *s;
      r.n_t = to_u64(origin, "n_t", f[1]);
      r.snr_db = to_double(origin, "snr_db", f[2]);
      r.secrecy_bits = to_double(origin, "secrecy_bits", f[3]);
      r.user_bits = to_double(origin, "user_bits", f[4]);
      r.eve_bits = to_double(origin, "eve_bits", f[5]);
      r.std_error = to_double(origin, "std_error", f[6]);
      r.trials = to_u64(origin, "trials", f[7]);
      r.flags = trim(f[8]);
    } catch (const ConfigError& e) {
      throw std::runtime_error(e.what());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows to write");
  write_file(path, format_csv(rows));
}

std::string format_plot_script(const std::vector<ResultRow>& rows, std::string_view image_name) {
  if (rows.empty()) throw std::invalid_argument("format_plot_script: no rows");
  std::map<std::pair<Scheme, std::size_t>, std::vector<std::pair<double, double>>> curves;
  for (const auto& r : rows) curves[{r.scheme, r.n_t}].emplace_back(r.snr_db, r.secrecy_bits);

  std::ostringstream out;
  out << "# gnuplot script: ergodic secrecy rate vs SNR\n"
      << "set terminal pngcairo size 900,600 enhanced\n"
      << "set output '" << image_name << "'\n"
      << "set xlabel 'P_T/{/Symbol s}^2 (dB)'\n"
      << "set ylabel 'Ergodic secrecy rate (bits/channel use)'\n"
      << "set key top left\n"
      << "set grid\n\n";
  int idx = 0;
  std::vector<std::string> plots;
  for (auto& [key, points] : curves) {
    std::sort(points.begin(), points.end());
    const std::string block = "$curve" + std::to_string(idx++);
    out << block << " << EOD\n";
    for (const auto& [x, y] : points) out << format_number(x) << ' ' << format_number(y) << '\n';
    out << "EOD\n";
    std::string title = std::string(scheme_label(key.first)) + ", N_t=" + std::to_string(key.second);
    plots.push_back(block + " using 1:2 with linespoints title '" + title + "'");
  }
  out << "\nplot ";
  for (std::size_t i = 0; i < plots.size(); ++i) {
    out << (i == 0 ? "" : ", \\\n     ") << plots[i];
  }
  out << '\n';
  return out.str();
}

void emit_plot_script(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::filesystem::path image = path.filename();
  image.replace_extension(".png");
  write_file(path, format_plot_script(rows, image.string()));
}

}  // namespace cesec
