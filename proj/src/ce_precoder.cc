#include "cesec/ce_precoder.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cesec {

namespace {

constexpr double kBoundaryRelTol = 1e-12;

Complex unit(double phase) { return std::polar(1.0, phase); }

Complex raw_sum(std::span<const Complex> h, const std::vector<double>& theta) {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * unit(theta[i]);
  return s;
}

double residual_of(Complex u, std::span<const Complex> h, const std::vector<double>& theta) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(h.size()));
  return std::norm(u - raw_sum(h, theta) * scale);
}

double safe_arg(Complex z) { return z == Complex{0.0, 0.0} ? 0.0 : std::arg(z); }

}  // namespace

DoughnutBounds doughnut_bounds(const ChannelVector& h) {
  const double root_n = std::sqrt(static_cast<double>(h.size()));
  return {norm_1(h.span()) / root_n, norm_inf(h.span()) / root_n};
}

Complex synthesize_noise_free(const ChannelVector& h, const PhaseVector& theta) {
  if (h.size() != theta.size()) {
    throw std::invalid_argument("synthesize_noise_free: channel has " +
                                std::to_string(h.size()) + " antennas, phase vector " +
                                std::to_string(theta.size()));
  }
  if (h.size() == 0) throw std::invalid_argument("synthesize_noise_free: empty channel");
  return raw_sum(h.span(), theta.phases) / std::sqrt(static_cast<double>(h.size()));
}

PhaseVector rotate_phases(const PhaseVector& theta, double psi) {
  PhaseVector out;
  out.phases.reserve(theta.size());
  for (double t : theta.phases) out.phases.push_back(wrap_phase(t + psi));
  return out;
}

PrecodeResult precode(Complex u, const ChannelVector& h, const PrecodeOptions& opts,
                      RngStream& stream) {
  if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
    throw std::invalid_argument("precode: non-finite information symbol");
  }
  validate(h);
  const auto gains = h.span();
  const std::size_t n = gains.size();
  const double root_n = std::sqrt(static_cast<double>(n));

  PrecodeResult result;
  result.phases.phases.resize(n);
  auto& theta = result.phases.phases;

  const double outer = norm_1(gains) / root_n;
  if (std::abs(u) >= outer * (1.0 - kBoundaryRelTol)) {
    const double target_arg = safe_arg(u);
    for (std::size_t i = 0; i < n; ++i) theta[i] = wrap_phase(target_arg - safe_arg(gains[i]));
    result.residual = residual_of(u, gains, theta);
    result.converged = result.residual <= opts.tolerance;
    return result;
  }

  for (auto& t : theta) t = stream.uniform_phase();
  const Complex target = u * root_n;
  Complex sum = raw_sum(gains, theta);

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      if (gains[i] == Complex{0.0, 0.0}) continue;
      const Complex rest = sum - gains[i] * unit(theta[i]);
      const Complex r = target - rest;
      if (r != Complex{0.0, 0.0}) theta[i] = wrap_phase(std::arg(r) - std::arg(gains[i]));
      sum = rest + gains[i] * unit(theta[i]);
    }
    // Recompute from scratch so the running sum cannot drift.
    sum = raw_sum(gains, theta);
    result.iterations = sweep;
    result.residual = std::norm(u - sum / root_n);
    if (result.residual <= opts.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

std::vector<Complex> ce_transmit_vector(const PhaseVector& theta, double p_t) {
  const double amplitude = std::sqrt(p_t / static_cast<double>(theta.size()));
  std::vector<Complex> x;
  x.reserve(theta.size());
  for (double t : theta.phases) x.push_back(std::polar(amplitude, t));
  return x;
}

}  // namespace cesec
