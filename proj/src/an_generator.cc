#include "cesec/an_generator.h"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cesec {

namespace {

constexpr double kPi = std::numbers::pi;

// f(psi) = A cos psi + B sin psi + C cos 2psi + D sin 2psi.
struct TrigQuadratic {
  double a, b, c, d;

  double value(double x) const {
    return a * std::cos(x) + b * std::sin(x) + c * std::cos(2 * x) + d * std::sin(2 * x);
  }
  double slope(double x) const {
    return -a * std::sin(x) + b * std::cos(x) - 2 * c * std::sin(2 * x) + 2 * d * std::cos(2 * x);
  }
  double curvature(double x) const {
    return -a * std::cos(x) - b * std::sin(x) - 4 * c * std::cos(2 * x) -
           4 * d * std::sin(2 * x);
  }

  // Global minimizer: coarse scan, then Newton on the best bracket. A degree-2
  // trigonometric polynomial has at most two local minima, so 32 samples
  // always land in the right basin up to near-ties.
  double argmin() const {
    constexpr int kGrid = 32;
    double best_x = 0.0;
    double best_f = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kGrid; ++k) {
      const double x = -kPi + 2.0 * kPi * k / kGrid;
      const double f = value(x);
      if (f < best_f) {
        best_f = f;
        best_x = x;
      }
    }
    double x = best_x;
    for (int it = 0; it < 20; ++it) {
      const double h2 = curvature(x);
      if (!(h2 > 0.0)) break;
      const double step = slope(x) / h2;
      const double next = x - step;
      const double f_next = value(next);
      if (f_next > best_f) break;
      x = next;
      best_f = f_next;
      if (std::abs(step) < 1e-15) break;
    }
    return x;
  }
};

struct InvisibilityState {
  Complex sum{0.0, 0.0};  // sum h_i cos(theta_i - phi_i) e^{j phi_i}
  double power = 0.0;     // sum beta_i^2
};

InvisibilityState evaluate(std::span<const Complex> h, std::span<const double> theta,
                           std::span<const double> phi) {
  InvisibilityState s;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double c = std::cos(theta[i] - phi[i]);
    s.sum += h[i] * c * std::polar(1.0, phi[i]);
    s.power += 4.0 * c * c;
  }
  return s;
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

AnComponent build_an(std::span<const double> theta, std::vector<double> phi) {
  AnComponent an;
  an.amplitudes.resize(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = wrap_phase(phi[i]);
    an.amplitudes[i] = an_amplitude(theta[i], phi[i]);
  }
  an.phases = std::move(phi);
  return an;
}

}  // namespace

double AnComponent::power() const {
  double p = 0.0;
  for (double b : amplitudes) p += b * b;
  return p;
}

double an_amplitude(double theta, double phi) { return -2.0 * std::cos(theta - phi); }

AnComponent zero_an(const PhaseVector& theta) {
  std::vector<double> phi(theta.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = theta.phases[i] + kPi / 2.0;
  auto an = build_an(theta.phases, std::move(phi));
  for (auto& b : an.amplitudes) b = 0.0;
  return an;
}

double Scheme1Options::target_from_eta(double eta, std::size_t n_t) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("target_from_eta: eta must be in (0, 1]");
  }
  return static_cast<double>(n_t) * (1.0 - eta) / eta;
}

double scheme1_residual(const ChannelVector& h, const PhaseVector& theta,
                        std::span<const double> phi) {
  require_same_length(h.size(), theta.size(), "scheme1_residual");
  require_same_length(h.size(), phi.size(), "scheme1_residual");
  return std::abs(evaluate(h.span(), theta.phases, phi).sum);
}

Scheme1Result scheme1_solve(const ChannelVector& h, const PhaseVector& theta,
                            const Scheme1Options& opts, RngStream& stream) {
  validate(h);
  require_same_length(h.size(), theta.size(), "scheme1_solve");
  const std::size_t n = h.size();
  if (n < 3) throw std::invalid_argument("scheme1_solve: needs at least 3 antennas");
  const double target = opts.an_power_target;
  if (!(target >= 0.0) || target > 4.0 * static_cast<double>(n)) {
    throw std::invalid_argument("scheme1_solve: AN power target " + std::to_string(target) +
                                " outside [0, 4 N] = [0, " + std::to_string(4 * n) + "]");
  }
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("scheme1_solve: tolerance must be > 0");

  const auto gains = h.span();
  const auto& th = theta.phases;
  const double h_norm = norm_2(gains);
  const double weight = opts.penalty_weight.value_or(1.0 / static_cast<double>(n));
  if (!(weight > 0.0)) throw std::invalid_argument("scheme1_solve: penalty weight must be > 0");

  Scheme1Result result;
  if (target == 0.0) {
    result.an = zero_an(theta);
    result.invisibility = scheme1_residual(h, theta, result.an.phases) / h_norm;
    result.converged = result.invisibility <= opts.tolerance;
    return result;
  }

  auto objective = [&](const InvisibilityState& s) {
    const double dp = s.power - target;
    return std::norm(s.sum) + weight * dp * dp;
  };
  auto accepted = [&](const InvisibilityState& s) {
    return std::abs(s.sum) <= opts.tolerance * h_norm &&
           std::abs(s.power - target) <= opts.power_rel_tolerance * target;
  };

  std::vector<double> best_phi;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<double> phi(n);

  for (int restart = 0; restart <= opts.restarts && !result.converged; ++restart) {
    result.restarts_used = restart;
    for (auto& p : phi) p = stream.uniform_phase();
    InvisibilityState state = evaluate(gains, th, phi);
    double prev_obj = objective(state);
    if (prev_obj < best_obj) {
      best_obj = prev_obj;
      best_phi = phi;
    }

    for (int sweep = 1; sweep <= opts.max_iters; ++sweep) {
      for (std::size_t i = 0; i < n; ++i) {
        const double c_old = std::cos(th[i] - phi[i]);
        const Complex rest = state.sum - gains[i] * c_old * std::polar(1.0, phi[i]);
        const double rest_power = state.power - 4.0 * c_old * c_old;

        // With psi = 2 phi - theta the term is (h/2)(e^{j theta} + e^{j psi})
        // and beta^2 = 2 + 2 cos(psi - theta).
        const Complex r = rest + 0.5 * gains[i] * std::polar(1.0, th[i]);
        const double q = rest_power + 2.0 - target;
        const double amp = std::abs(r) * std::abs(gains[i]);
        const double alpha = std::arg(r) - std::arg(gains[i]);
        const TrigQuadratic f{
            amp * std::cos(alpha) + 4.0 * weight * q * std::cos(th[i]),
            amp * std::sin(alpha) + 4.0 * weight * q * std::sin(th[i]),
            2.0 * weight * std::cos(2.0 * th[i]),
            2.0 * weight * std::sin(2.0 * th[i]),
        };
        const double psi_old = 2.0 * phi[i] - th[i];
        const double psi_new = f.argmin();
        if (f.value(psi_new) <= f.value(psi_old)) phi[i] = wrap_phase(0.5 * (psi_new + th[i]));

        const double c_new = std::cos(th[i] - phi[i]);
        state.sum = rest + gains[i] * c_new * std::polar(1.0, phi[i]);
        state.power = rest_power + 4.0 * c_new * c_new;
      }
      state = evaluate(gains, th, phi);
      result.sweeps += 1;
      const double obj = objective(state);
      if (obj < best_obj) {
        best_obj = obj;
        best_phi = phi;
      }
      if (accepted(state)) {
        best_phi = phi;
        result.converged = true;
        break;
      }
      // Stalled at a nonzero stationary point: restart.
      if (prev_obj - obj <= 1e-14 * prev_obj) break;
      prev_obj = obj;
    }
  }

  result.an = build_an(th, best_phi);
  const auto final_state = evaluate(gains, th, result.an.phases);
  result.invisibility = std::abs(final_state.sum) / h_norm;
  result.an_power = result.an.power();
  result.converged = accepted(final_state);
  return result;
}

Scheme2Result scheme2_generate(const ChannelVector& h, const PhaseVector& theta,
                               RngStream& stream, const Scheme2Options& opts) {
  validate(h);
  require_same_length(h.size(), theta.size(), "scheme2_generate");
  if (!h.cancel_gain) throw std::invalid_argument("scheme2_generate: channel has no cancellation gain");
  const Complex h0 = *h.cancel_gain;
  if (h0 == Complex{0.0, 0.0}) throw std::invalid_argument("scheme2_generate: cancellation gain is zero");

  std::vector<double> phi(h.size());
  for (auto& p : phi) p = stream.uniform_phase();

  Scheme2Result result;
  result.an = build_an(theta.phases, std::move(phi));
  result.an.cancel_signal = -an_leakage(h.span(), result.an) / h0;
  result.low_cancel_gain = std::abs(h0) < opts.cancel_gain_floor;
  return result;
}

Complex an_leakage(std::span<const Complex> channel, const AnComponent& an) {
  require_same_length(channel.size(), an.size(), "an_leakage");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < channel.size(); ++i) {
    s += channel[i] * an.amplitudes[i] * std::polar(1.0, an.phases[i]);
  }
  return s;
}

Complex aggregate_an_at(const ChannelVector& channel, const AnComponent& an, double p_t) {
  Complex s = an_leakage(channel.span(), an);
  if (channel.cancel_gain && an.cancel_signal) s += *channel.cancel_gain * *an.cancel_signal;
  return std::sqrt(p_t / static_cast<double>(channel.size())) * s;
}

std::vector<Complex> combined_transmit_vector(const PhaseVector& theta, const AnComponent& an,
                                              double p_t) {
  require_same_length(theta.size(), an.size(), "combined_transmit_vector");
  const double amplitude = std::sqrt(p_t / static_cast<double>(theta.size()));
  std::vector<Complex> x(theta.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = amplitude * (std::polar(1.0, theta.phases[i]) +
                        an.amplitudes[i] * std::polar(1.0, an.phases[i]));
  }
  return x;
}

}  // namespace cesec
