#include "cesec/capacity.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cesec/parallel.h"

namespace cesec {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double clamp_nonneg(double x) { return x > 0.0 ? x : 0.0; }

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

// Index-ordered accumulation keeps results independent of worker count.
MeanAndError mean_and_error(const std::vector<double>& xs) {
  MeanAndError r;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

double ce_lower_integrand(std::span<const Complex> h, double snr) {
  const double n1 = norm_1(h);
  const double ninf = norm_inf(h);
  const double gain = (n1 * n1 - ninf * ninf) / (static_cast<double>(h.size()) * std::numbers::e);
  return std::log2(1.0 + snr * gain);
}

void require_trials(const MonteCarlo& mc) {
  if (mc.trials == 0) throw std::invalid_argument("Monte-Carlo trial count must be >= 1");
}

// d/dsnr of ergodic_rayleigh_capacity.
double ergodic_rayleigh_slope(double snr) {
  if (snr <= 0.0) return 1.0 / kLn2;
  const double inv = 1.0 / snr;
  return (1.0 - inv * scaled_exp_integral(1, inv)) / (snr * kLn2);
}

// Per-trial quantities for the CE + AN estimators.
struct AnTrial {
  double user_rate = 0.0;
  double signal_power = 0.0;  // eavesdropper information power
  double an_power = 0.0;      // eavesdropper AN power
  double cancel_power = 0.0;
  bool low_cancel_gain = false;
  bool solver_failed = false;
};

struct AnSummary {
  CapacityResult user;
  CapacityResult eve;
  CapacityResult secrecy;
  double low_cancel_gain_rate = 0.0;
  double solver_failure_rate = 0.0;
  double mean_cancel_power = 0.0;
};

// Eavesdropper rate from ensemble-mean power terms, with delta-method
// standard errors that account for the user/eavesdropper correlation.
AnSummary summarize(const std::vector<AnTrial>& trials, const SystemParams& p,
                    const MonteCarlo& mc, Estimator eve_estimator) {
  const double n = static_cast<double>(trials.size());
  double su = 0.0, sp = 0.0, sa = 0.0, sc = 0.0, low = 0.0, failed = 0.0;
  for (const auto& t : trials) {
    su += t.user_rate;
    sp += t.signal_power;
    sa += t.an_power;
    sc += t.cancel_power;
    low += t.low_cancel_gain ? 1.0 : 0.0;
    failed += t.solver_failed ? 1.0 : 0.0;
  }
  const double mean_user = su / n;
  const double mean_signal = sp / n;
  const double mean_an = sa / n;
  const double denom = mean_an + p.sigma2;
  const double sinr = clamp_nonneg(mean_signal / denom);
  const double eve = ergodic_rayleigh_capacity(sinr);
  const double slope = ergodic_rayleigh_slope(sinr);

  double ss_user = 0.0, ss_eve = 0.0, ss_sec = 0.0;
  for (const auto& t : trials) {
    const double d_sinr =
        (t.signal_power - mean_signal) / denom - sinr * (t.an_power - mean_an) / denom;
    const double d_user = t.user_rate - mean_user;
    const double d_eve = slope * d_sinr;
    ss_user += d_user * d_user;
    ss_eve += d_eve * d_eve;
    ss_sec += (d_user - d_eve) * (d_user - d_eve);
  }
  auto se = [&](double ss) { return n > 1.0 ? std::sqrt(ss / (n - 1.0) / n) : 0.0; };

  AnSummary s;
  s.user = {mean_user, Estimator::kMcLowerBound, mc.trials, se(ss_user), mc.seed};
  s.eve = {eve, eve_estimator, mc.trials, se(ss_eve), mc.seed};
  s.secrecy = {clamp_nonneg(mean_user - eve), Estimator::kMcEstimate, mc.trials, se(ss_sec),
               mc.seed};
  s.low_cancel_gain_rate = low / n;
  s.solver_failure_rate = failed / n;
  s.mean_cancel_power = sc / n;
  return s;
}

Complex draw_symbol(const ChannelVector& h, double radius, RngStream& stream) {
  const double outer = doughnut_bounds(h).outer;
  return std::polar(radius * outer, stream.uniform_phase());
}

// Fills the eavesdropper power terms of one trial.
void eavesdropper_powers(const SystemParams& p, const ChannelVector& g, const PhaseVector& theta,
                         const AnComponent& an, std::optional<Complex> cancel_term,
                         EveBound bound, AnTrial& out) {
  const double n = static_cast<double>(g.size());
  const double scale = std::sqrt(p.p_t / n);
  Complex an_rx = an_leakage(g.span(), an);
  if (cancel_term) an_rx += *cancel_term;
  an_rx *= scale;
  out.an_power = std::norm(an_rx);
  if (bound == EveBound::kUpper) {
    double g2 = 0.0;
    for (const auto& gi : g.gains) g2 += std::norm(gi);
    out.signal_power = p.p_t * g2 / n;
  } else {
    const Complex signal_rx = std::sqrt(p.p_t) * synthesize_noise_free(g, theta);
    out.signal_power = std::norm(signal_rx + an_rx) - out.an_power;
  }
}

std::vector<AnTrial> run_scheme2_trials(const SystemParams& p, const MonteCarlo& mc,
                                        const AnEstimatorOptions& opts) {
  std::vector<AnTrial> trials(mc.trials);
  const double snr = p.snr();
  parallel_for(mc.trials, mc.workers, [&](std::size_t t) {
    RngStream stream = derive_trial_stream(mc.seed, t);
    const LinkChannels links = sample_links(p.n_t, true, stream);
    AnTrial& out = trials[t];
    out.user_rate = ce_lower_integrand(links.user.span(), snr);

    const Complex u = draw_symbol(links.user, opts.symbol_radius, stream);
    const PrecodeResult pre = precode(u, links.user, opts.precoder, stream);

    AnComponent an = zero_an(pre.phases);
    an.cancel_signal = Complex{0.0, 0.0};
    if (opts.an_enabled) {
      Scheme2Result gen = scheme2_generate(links.user, pre.phases, stream, opts.scheme2);
      out.low_cancel_gain = gen.low_cancel_gain;
      an = std::move(gen.an);
    }
    Complex x0 = *an.cancel_signal;
    if (opts.an_enabled && opts.leakage_phase == LeakagePhase::kSignalPhase) {
      Complex s{0.0, 0.0};
      for (std::size_t i = 0; i < p.n_t; ++i) {
        s += links.user.gains[i] * an.amplitudes[i] * std::polar(1.0, pre.phases.phases[i]);
      }
      x0 = -s / *links.user.cancel_gain;
    }
    out.cancel_power = p.p_t / static_cast<double>(p.n_t) * std::norm(x0);
    eavesdropper_powers(p, links.eve, pre.phases, an, *links.eve.cancel_gain * x0, opts.bound,
                        out);
  });
  return trials;
}

Estimator bound_estimator(EveBound b) {
  return b == EveBound::kUpper ? Estimator::kMcUpperBound : Estimator::kMcLowerBound;
}

}  // namespace

SystemParams SystemParams::from_snr_db(double snr_db, std::size_t n_t, double eta) {
  SystemParams p;
  p.p_t = 1.0;
  p.sigma2 = std::pow(10.0, -snr_db / 10.0);
  p.n_t = n_t;
  p.eta = eta;
  return p;
}

void SystemParams::validate() const {
  if (!(p_t > 0.0) || !std::isfinite(p_t)) throw std::invalid_argument("p_t must be > 0");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be > 0");
  if (n_t < 1) throw std::invalid_argument("n_t must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in [0, 1]");
}

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::kClosedForm: return "closed_form";
    case Estimator::kMcLowerBound: return "mc_lower_bound";
    case Estimator::kMcUpperBound: return "mc_upper_bound";
    case Estimator::kMcEstimate: return "mc_estimate";
  }
  return "unknown";
}

double ergodic_rayleigh_capacity(double snr) {
  if (snr < 0.0 || !std::isfinite(snr)) {
    throw std::invalid_argument("ergodic_rayleigh_capacity: snr must be finite and >= 0");
  }
  if (snr == 0.0) return 0.0;
  return scaled_exp_integral(1, 1.0 / snr) / kLn2;
}

CapacityResult c_mf(const SystemParams& p) {
  p.validate();
  const double x = p.sigma2 / p.p_t;
  const double v = scaled_exp_integral_sum(1, static_cast<int>(p.n_t), x) / kLn2;
  return {v, Estimator::kClosedForm, 0, 0.0, 0};
}

CapacityResult c_eve_closed(const SystemParams& p) {
  p.validate();
  return {ergodic_rayleigh_capacity(p.snr()), Estimator::kClosedForm, 0, 0.0, 0};
}

CapacityResult c_sec_mf(const SystemParams& p) {
  return {clamp_nonneg(c_mf(p).value - c_eve_closed(p).value), Estimator::kClosedForm, 0, 0.0, 0};
}

double c_sec_mf_partial_sum(const SystemParams& p) {
  p.validate();
  const double x = p.sigma2 / p.p_t;
  return clamp_nonneg(scaled_exp_integral_sum(2, static_cast<int>(p.n_t), x) / kLn2);
}

CapacityResult c_ce_lower_mc(const SystemParams& p, const MonteCarlo& mc) {
  p.validate();
  require_trials(mc);
  std::vector<double> rates(mc.trials);
  const double snr = p.snr();
  parallel_for(mc.trials, mc.workers, [&](std::size_t t) {
    RngStream stream = derive_trial_stream(mc.seed, t);
    const ChannelVector h = sample_channel(p.n_t, false, stream);
    rates[t] = ce_lower_integrand(h.span(), snr);
  });
  const auto m = mean_and_error(rates);
  return {m.mean, Estimator::kMcLowerBound, mc.trials, m.std_error, mc.seed};
}

SecrecyReport c_sec_ce(const SystemParams& p, const MonteCarlo& mc) {
  SecrecyReport r;
  r.user = c_ce_lower_mc(p, mc);
  r.eve = c_ce_eve(p);
  r.secrecy = {clamp_nonneg(r.user.value - r.eve.value), Estimator::kMcEstimate, mc.trials,
               r.user.std_error, mc.seed};
  return r;
}

CapacityResult eve_upper_bound_scheme2(const SystemParams& p, const MonteCarlo& mc,
                                       const AnEstimatorOptions& opts) {
  return secrecy_scheme2_mc(p, mc, opts).eve;
}

SecrecyReport secrecy_scheme2_mc(const SystemParams& p, const MonteCarlo& mc,
                                 const AnEstimatorOptions& opts) {
  p.validate();
  require_trials(mc);
  const auto trials = run_scheme2_trials(p, mc, opts);
  const AnSummary s = summarize(trials, p, mc, bound_estimator(opts.bound));
  SecrecyReport r;
  r.user = s.user;
  r.eve = s.eve;
  r.secrecy = s.secrecy;
  r.low_cancel_gain_rate = s.low_cancel_gain_rate;
  r.mean_cancel_power = s.mean_cancel_power;
  return r;
}

SecrecyReport secrecy_scheme1_mc(const SystemParams& p, const Scheme1Options& scheme1,
                                 const MonteCarlo& mc, const AnEstimatorOptions& opts) {
  p.validate();
  require_trials(mc);
  if (p.n_t < 3) throw std::invalid_argument("secrecy_scheme1_mc: needs at least 3 antennas");
  std::vector<AnTrial> trials(mc.trials);
  const double snr = p.snr();
  parallel_for(mc.trials, mc.workers, [&](std::size_t t) {
    RngStream stream = derive_trial_stream(mc.seed, t);
    const LinkChannels links = sample_links(p.n_t, false, stream);
    AnTrial& out = trials[t];
    out.user_rate = ce_lower_integrand(links.user.span(), snr);

    const Complex u = draw_symbol(links.user, opts.symbol_radius, stream);
    const PrecodeResult pre = precode(u, links.user, opts.precoder, stream);
    AnComponent an = zero_an(pre.phases);
    if (opts.an_enabled) {
      Scheme1Result solved = scheme1_solve(links.user, pre.phases, scheme1, stream);
      out.solver_failed = !solved.converged;
      an = std::move(solved.an);
    }
    eavesdropper_powers(p, links.eve, pre.phases, an, std::nullopt, opts.bound, out);
  });

  const AnSummary s = summarize(trials, p, mc, bound_estimator(opts.bound));
  if (s.solver_failure_rate > 0.2) {
    std::ostringstream msg;
    msg << "secrecy_scheme1_mc: AN solver failed on " << s.solver_failure_rate * 100.0
        << "% of " << mc.trials << " trials (n_t=" << p.n_t
        << ", target=" << scheme1.an_power_target << ", tolerance=" << scheme1.tolerance << ")";
    throw EstimatorError(msg.str());
  }

  SecrecyReport r;
  r.user = s.user;
  r.eve = s.eve;
  r.secrecy = s.secrecy;
  r.solver_failure_rate = s.solver_failure_rate;
  r.trivial_eve = c_ce_eve(p);
  r.trivial_secrecy = CapacityResult{clamp_nonneg(s.user.value - r.trivial_eve->value),
                                     Estimator::kMcEstimate, mc.trials, s.user.std_error, mc.seed};
  return r;
}

std::vector<double> default_eta_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
  return grid;
}

SecrecyReport secrecy_mf_an_opt(const SystemParams& p, const std::vector<double>& eta_grid,
                                const MonteCarlo& mc) {
  p.validate();
  require_trials(mc);
  if (p.n_t < 2) throw std::invalid_argument("secrecy_mf_an_opt: N = 1 has no null space for AN");
  if (eta_grid.empty()) throw std::invalid_argument("secrecy_mf_an_opt: empty eta grid");
  for (double eta : eta_grid) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("secrecy_mf_an_opt: eta outside [0, 1]");
  }

  const std::size_t grid = eta_grid.size();
  const double snr = p.snr();
  const double null_dims = static_cast<double>(p.n_t - 1);
  // Row-major [trial][eta] user and eavesdropper rates.
  std::vector<double> user(mc.trials * grid), eve(mc.trials * grid);
  parallel_for(mc.trials, mc.workers, [&](std::size_t t) {
    RngStream stream = derive_trial_stream(mc.seed, t);
    const LinkChannels links = sample_links(p.n_t, false, stream);
    const NullSpaceProjector projector(links.user.span());
    double h2 = 0.0;
    for (const auto& hi : links.user.gains) h2 += std::norm(hi);
    const double beam = projector.beam_gain2(links.eve.span());
    const double leak = projector.projected_norm2(links.eve.span());
    for (std::size_t k = 0; k < grid; ++k) {
      const double eta = eta_grid[k];
      user[t * grid + k] = std::log2(1.0 + eta * snr * h2);
      eve[t * grid + k] =
          std::log2(1.0 + eta * snr * beam / ((1.0 - eta) * snr * leak / null_dims + 1.0));
    }
  });

  SecrecyReport best;
  bool have = false;
  for (std::size_t k = 0; k < grid; ++k) {
    std::vector<double> u(mc.trials), e(mc.trials), d(mc.trials);
    for (std::size_t t = 0; t < mc.trials; ++t) {
      u[t] = user[t * grid + k];
      e[t] = eve[t * grid + k];
      d[t] = u[t] - e[t];
    }
    const auto mu = mean_and_error(u);
    const auto me = mean_and_error(e);
    const auto md = mean_and_error(d);
    const double secrecy = clamp_nonneg(mu.mean - me.mean);
    if (!have || secrecy > best.secrecy.value) {
      have = true;
      best.user = {mu.mean, Estimator::kMcEstimate, mc.trials, mu.std_error, mc.seed};
      best.eve = {me.mean, Estimator::kMcEstimate, mc.trials, me.std_error, mc.seed};
      best.secrecy = {secrecy, Estimator::kMcEstimate, mc.trials, md.std_error, mc.seed};
      best.best_eta = eta_grid[k];
    }
  }
  return best;
}

NullSpaceProjector::NullSpaceProjector(std::span<const Complex> h) {
  const double h_norm = norm_2(h);
  if (!(h_norm > 0.0)) throw std::invalid_argument("NullSpaceProjector: zero channel");
  w_.resize(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) w_[i] = std::conj(h[i]) / h_norm;
  // v = w + e^{j arg w_1} e_1 avoids cancellation in the first entry.
  v_ = w_;
  const double a = std::abs(w_[0]);
  v_[0] += a > 0.0 ? w_[0] / a : Complex{1.0, 0.0};
  v_norm2_ = 0.0;
  for (const auto& vi : v_) v_norm2_ += std::norm(vi);
}

double NullSpaceProjector::beam_gain2(std::span<const Complex> g) const {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * w_[i];
  return std::norm(s);
}

double NullSpaceProjector::projected_norm2(std::span<const Complex> g) const {
  if (g.size() != v_.size()) throw std::invalid_argument("NullSpaceProjector: length mismatch");
  // (g H)_k = g_k - 2 (g v) conj(v_k) / ||v||^2; drop k = 1.
  Complex gv{0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) gv += g[i] * v_[i];
  const Complex c = 2.0 * gv / v_norm2_;
  double s = 0.0;
  for (std::size_t k = 1; k < g.size(); ++k) s += std::norm(g[k] - c * std::conj(v_[k]));
  return s;
}

std::vector<std::vector<Complex>> NullSpaceProjector::basis() const {
  const std::size_t n = v_.size();
  std::vector<std::vector<Complex>> cols(n - 1, std::vector<Complex>(n));
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const Complex delta = i == k ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
      cols[k - 1][i] = delta - 2.0 * v_[i] * std::conj(v_[k]) / v_norm2_;
    }
  }
  return cols;
}

}  // namespace cesec
