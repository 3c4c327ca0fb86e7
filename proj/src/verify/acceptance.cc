#include "cesec/verify/acceptance.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cesec/harness.h"
#include "cesec/verify/oracles.h"

namespace cesec::verify {

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

Outcome closed_form_identity() {
  double worst = 0.0;
  for (std::size_t n : {1u, 4u, 64u}) {
    for (double snr_db : {0.0, 10.0, 30.0}) {
      const auto p = SystemParams::from_snr_db(snr_db, n);
      const double diff_form = c_mf(p).value - c_eve_closed(p).value;
      worst = std::max(worst, std::abs(diff_form - c_sec_mf_partial_sum(p)));
    }
  }
  return {worst <= 1e-12, "max |difference form - partial sum| = " + fmt(worst)};
}

Outcome closed_form_vs_mc() {
  const auto p = SystemParams::from_snr_db(10.0, 64);
  const double closed = c_mf(p).value;
  const auto mc = log2_one_plus_gamma_mc(p.snr(), 64.0, 10000, 20240601);
  const double z = std::abs(closed - mc.mean) / mc.std_error;
  return {z <= 3.0, "closed " + fmt(closed) + " vs MC " + fmt(mc.mean) + " +- " +
                        fmt(mc.std_error) + " (" + fmt(z) + " SE)"};
}

Outcome recurrence_suite() {
  double worst = 0.0;
  for (double x : {0.01, 0.1, 1.0, 5.0, 20.0}) {
    for (int n = 1; n <= 128; ++n) {
      const double lhs = gen_exp_integral(n + 1, x);
      const double rhs = (std::exp(-x) - x * gen_exp_integral(n, x)) / n;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return {worst <= 1e-10, "max recurrence error = " + fmt(worst)};
}

double envelope_error(const std::vector<Complex>& x, double p_t) {
  const double target = std::sqrt(p_t / static_cast<double>(x.size()));
  double worst = 0.0;
  for (const auto& xi : x) worst = std::max(worst, std::abs(std::abs(xi) - target) / target);
  return worst;
}

Outcome ce_envelope(std::uint64_t instances) {
  constexpr std::size_t kN = 100;
  constexpr double kPt = 1.0;
  double worst[3] = {0.0, 0.0, 0.0};
  Scheme1Options s1;
  s1.an_power_target = kN / 3.0;
  for (std::uint64_t t = 0; t < instances; ++t) {
    RngStream stream = derive_trial_stream(4001, t);
    ChannelVector h = sample_channel(kN, true, stream);
    const Complex u = std::polar(stream.uniform() * doughnut_bounds(h).outer, stream.uniform_phase());
    const auto pre = precode(u, h, {}, stream);
    worst[0] = std::max(worst[0], envelope_error(ce_transmit_vector(pre.phases, kPt), kPt));
    const auto a1 = scheme1_solve(h, pre.phases, s1, stream);
    worst[1] = std::max(worst[1], envelope_error(combined_transmit_vector(pre.phases, a1.an, kPt), kPt));
    const auto a2 = scheme2_generate(h, pre.phases, stream);
    worst[2] = std::max(worst[2], envelope_error(combined_transmit_vector(pre.phases, a2.an, kPt), kPt));
  }
  const double w = std::max({worst[0], worst[1], worst[2]});
  return {w <= 1e-12, "max relative envelope error: no-AN " + fmt(worst[0]) + ", Scheme I " +
                          fmt(worst[1]) + ", Scheme II " + fmt(worst[2])};
}

Outcome precoder_oracle(std::uint64_t instances) {
  constexpr std::size_t kN = 6;
  double worst_gap = -1.0;
  for (std::uint64_t t = 0; t < instances; ++t) {
    RngStream stream = derive_trial_stream(5001, t);
    ChannelVector h = sample_channel(kN, false, stream);
    const Complex u = std::polar(0.5 * doughnut_bounds(h).outer, stream.uniform_phase());
    const auto pre = precode(u, h, {}, stream);
    const auto grid = phase_grid_search(u, h.span(), 64);
    worst_gap = std::max(worst_gap, pre.residual - grid.residual);
  }
  return {worst_gap <= 1e-3, "max (solver - grid) residual = " + fmt(worst_gap)};
}

Outcome scheme2_cancellation(std::uint64_t draws) {
  constexpr std::size_t kN = 100;
  constexpr double kPt = 1.0;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < draws; ++t) {
    RngStream stream = derive_trial_stream(6001, t);
    ChannelVector h = sample_channel(kN, true, stream);
    const Complex u = std::polar(0.5 * doughnut_bounds(h).outer, stream.uniform_phase());
    const auto pre = precode(u, h, {}, stream);
    const auto an = scheme2_generate(h, pre.phases, stream).an;
    const double bound = norm_2(h.span()) * std::sqrt(kPt / kN);
    worst = std::max(worst, std::abs(aggregate_an_at(h, an, kPt)) / bound);
  }
  return {worst <= 1e-12, "max |aggregate AN at user| / (||h|| sqrt(P_T/N)) = " + fmt(worst)};
}

Outcome scheme1_invisibility(std::uint64_t trials) {
  constexpr std::size_t kN = 100;
  Scheme1Options opts;
  opts.an_power_target = kN / 3.0;
  std::uint64_t ok = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RngStream stream = derive_trial_stream(7001, t);
    ChannelVector h = sample_channel(kN, false, stream);
    const Complex u = std::polar(0.5 * doughnut_bounds(h).outer, stream.uniform_phase());
    const auto pre = precode(u, h, {}, stream);
    const auto r = scheme1_solve(h, pre.phases, opts, stream);
    const double residual = scheme1_residual(h, pre.phases, r.an.phases);
    const bool good = residual <= 1e-6 * norm_2(h.span()) &&
                      std::abs(r.an.power() - opts.an_power_target) <= 0.1 * opts.an_power_target;
    ok += good ? 1 : 0;
  }
  const double rate = static_cast<double>(ok) / static_cast<double>(trials);
  return {rate >= 0.95, "success " + std::to_string(ok) + "/" + std::to_string(trials)};
}

SweepConfig full_sweep_config(std::uint64_t trials, unsigned workers) {
  SweepConfig cfg;
  cfg.schemes = all_schemes();
  cfg.n_t_grid = {100};
  cfg.trials = trials;
  cfg.workers = workers;
  return cfg;
}

const ResultRow* find_row(const std::vector<ResultRow>& rows, Scheme s, double snr_db) {
  for (const auto& r : rows) {
    if (r.scheme == s && r.snr_db == snr_db) return &r;
  }
  return nullptr;
}

Outcome full_sweep_checks(const SweepOutcome& out) {
  if (!out.failures.empty()) {
    return {false, "cell failed: " + std::string(scheme_tag(out.failures.front().scheme)) + ": " +
                       out.failures.front().message};
  }
  auto get = [&](Scheme s, double snr) { return find_row(out.rows, s, snr); };
  const auto* mf30 = get(Scheme::kMf, 30);
  const auto* mf40 = get(Scheme::kMf, 40);
  const auto* ce30 = get(Scheme::kCe, 30);
  const auto* ce40 = get(Scheme::kCe, 40);
  const auto* s230 = get(Scheme::kCeScheme2, 30);
  const auto* s240 = get(Scheme::kCeScheme2, 40);
  const auto* an30 = get(Scheme::kMfAn, 30);
  if (!mf30 || !mf40 || !ce30 || !ce40 || !s230 || !s240 || !an30) return {false, "missing rows"};

  const double mf_gain = mf40->secrecy_bits - mf30->secrecy_bits;
  const double ce_gain = ce40->secrecy_bits - ce30->secrecy_bits;
  const double s2_gain = s240->secrecy_bits - s230->secrecy_bits;
  const bool a = mf_gain <= 0.2 && ce_gain <= 0.2;
  const bool b = s2_gain >= 1.0;
  const double se_an_s2 = std::hypot(an30->std_error, s230->std_error);
  const double se_s2_ce = std::hypot(s230->std_error, ce30->std_error);
  const bool c1 = an30->secrecy_bits >= s230->secrecy_bits - 3.0 * se_an_s2;
  const bool c2 = s230->secrecy_bits >= ce30->secrecy_bits - 3.0 * se_s2_ce;
  const double rel = std::abs(an30->secrecy_bits - s230->secrecy_bits) / an30->secrecy_bits;
  const bool c3 = rel <= 0.15;
  std::ostringstream d;
  d << "(a) MF +" << fmt(mf_gain) << ", CE +" << fmt(ce_gain) << (a ? " ok" : " FAIL")
    << "; (b) Scheme II +" << fmt(s2_gain) << (b ? " ok" : " FAIL") << "; (c) @30 dB MF-AN "
    << fmt(an30->secrecy_bits) << " / Scheme II " << fmt(s230->secrecy_bits) << " / CE "
    << fmt(ce30->secrecy_bits) << ", rel gap " << fmt(rel) << ((c1 && c2 && c3) ? " ok" : " FAIL");
  return {a && b && c1 && c2 && c3, d.str()};
}

Outcome eve_equivalence() {
  std::size_t points = 0;
  for (std::size_t n : {1u, 4u, 64u, 100u}) {
    for (int k = 0; k <= 10; ++k) {
      const auto p = SystemParams::from_snr_db(-10.0 + 5.0 * k, n);
      if (c_mf_eve(p).value != c_ce_eve(p).value) {
        return {false, "mismatch at n_t=" + std::to_string(n) + ", snr index " + std::to_string(k)};
      }
      ++points;
    }
  }
  return {true, std::to_string(points) + " grid points identical"};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> results;
  auto run = [&](int id, std::string name, double budget, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.budget_seconds = opts.quick ? 0.0 : budget;
    r.passed = o.passed && (r.budget_seconds == 0.0 || r.seconds < r.budget_seconds);
    r.detail = o.detail;
    if (o.passed && !r.passed) r.detail += " [over runtime budget]";
    results.push_back(std::move(r));
  };

  const bool q = opts.quick;
  run(1, "closed-form secrecy identity (two algebraic forms)", 1.0, closed_form_identity);
  run(2, "C_MF closed form vs Monte-Carlo oracle", 10.0, closed_form_vs_mc);
  run(3, "E_n upward recurrence", 1.0, recurrence_suite);
  run(4, "per-antenna constant envelope (no AN, Scheme I, Scheme II)", 30.0,
      [&] { return ce_envelope(q ? 50 : 1000); });
  run(5, "precoder vs exhaustive 64-level grid search (N_t=6)", 120.0,
      [&] { return precoder_oracle(q ? 5 : 100); });
  run(6, "Scheme II exact leakage cancellation", 30.0,
      [&] { return scheme2_cancellation(q ? 500 : 10000); });
  run(7, "Scheme I invisibility and AN power", 300.0,
      [&] { return scheme1_invisibility(q ? 40 : 200); });

  const std::uint64_t sweep_trials = q ? 100 : 1000;
  const std::filesystem::path dir(opts.artifact_dir);
  std::filesystem::create_directories(dir);
  SweepOutcome single;
  run(8, "secrecy vs SNR scheme ordering (N_t=100)", 600.0, [&] {
    single = run_sweep(full_sweep_config(sweep_trials, 1));
    if (!single.rows.empty()) emit_csv(single.rows, dir / "secrecy_sweep_workers1.csv");
    return full_sweep_checks(single);
  });
  run(9, "sweep determinism across worker counts (1 vs 8)", 0.0, [&] {
    const SweepOutcome multi = run_sweep(full_sweep_config(sweep_trials, 8));
    if (!multi.rows.empty()) emit_csv(multi.rows, dir / "secrecy_sweep_workers8.csv");
    const std::string a = format_csv(single.rows);
    const std::string b = format_csv(multi.rows);
    return Outcome{!single.rows.empty() && a == b,
                   a == b ? "CSV byte-identical (" + std::to_string(a.size()) + " bytes)"
                          : "CSV differs"};
  });
  run(10, "no-AN eavesdropper equivalence MF vs CE", 0.0, eve_equivalence);
  return results;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " (" << fmt(r.seconds)
    << " s";
  if (r.budget_seconds > 0.0) s << " / budget " << fmt(r.budget_seconds) << " s";
  s << "): " << r.detail;
  return s.str();
}

}  // namespace cesec::verify
