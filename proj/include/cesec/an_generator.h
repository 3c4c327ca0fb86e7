#pragma once

#include <optional>
#include <vector>

#include "cesec/ce_precoder.h"

namespace cesec {

/// Artificial-noise part of a CE transmit vector. The amplitudes are signed:
/// a negative beta is a pi phase flip, kept so beta = -2 cos(theta - phi)
/// holds literally.
struct AnComponent {
  std::vector<double> amplitudes;  // beta_i
  std::vector<double> phases;      // phi_i in (-pi, pi]
  /// Cancellation-antenna signal x_0, scale-free: the radiated sample is
  /// sqrt(P_T / N) * x_0.
  std::optional<Complex> cancel_signal;

  std::size_t size() const { return amplitudes.size(); }
  double power() const;  // sum beta_i^2
};

/// AN amplitude that keeps e^{j theta} + beta e^{j phi} on the unit circle.
double an_amplitude(double theta, double phi);

/// All-zero AN aligned with the given phases (phi_i = theta_i + pi/2).
AnComponent zero_an(const PhaseVector& theta);

struct Scheme1Options {
  double an_power_target = 0.0;  // target sum beta_i^2, in [0, 4 N]
  /// Weight on (sum beta^2 - target)^2. Unset means 1 / N.
  std::optional<double> penalty_weight;
  double tolerance = 1e-6;  // on |sum h_i cos(theta_i - phi_i) e^{j phi_i}| / ||h||_2
  int max_iters = 200;      // coordinate sweeps per restart
  int restarts = 4;
  double power_rel_tolerance = 0.1;

  /// Target implied by a power-allocation factor: N (1 - eta) / eta.
  static double target_from_eta(double eta, std::size_t n_t);
};

struct Scheme1Result {
  AnComponent an;
  bool converged = false;
  double invisibility = 0.0;  // |sum h_i cos(theta_i - phi_i) e^{j phi_i}| / ||h||_2
  double an_power = 0.0;
  int sweeps = 0;
  int restarts_used = 0;
};

/// Solves for AN phases that are invisible at the user while carrying the
/// requested AN power, by coordinate descent on
///   |sum h_i cos(theta_i - phi_i) e^{j phi_i}|^2 + w (sum beta_i^2 - target)^2
/// with random restarts. Each coordinate step minimizes the one-phase
/// trigonometric polynomial exactly.
///
/// Throws std::invalid_argument for N < 3, mismatched lengths, or a target
/// outside [0, 4 N]. Failure to converge is reported, not thrown.
Scheme1Result scheme1_solve(const ChannelVector& h, const PhaseVector& theta,
                            const Scheme1Options& opts, RngStream& stream);

/// Invisibility residual |sum h_i cos(theta_i - phi_i) e^{j phi_i}|.
double scheme1_residual(const ChannelVector& h, const PhaseVector& theta,
                        std::span<const double> phi);

struct Scheme2Options {
  double cancel_gain_floor = 1e-3;
};

struct Scheme2Result {
  AnComponent an;
  bool low_cancel_gain = false;  // |h_0| below the floor
};

/// Random-phase AN with leakage cancelled by the extra antenna:
/// phi_i uniform, beta_i = -2 cos(theta_i - phi_i),
/// x_0 = -sum h_i beta_i e^{j phi_i} / h_0.
///
/// Throws std::invalid_argument when h carries no cancellation gain or h_0 = 0.
Scheme2Result scheme2_generate(const ChannelVector& h, const PhaseVector& theta,
                               RngStream& stream, const Scheme2Options& opts = {});

/// Unscaled AN sum over antennas 1..N: sum_i c_i beta_i e^{j phi_i}.
Complex an_leakage(std::span<const Complex> channel, const AnComponent& an);

/// AN received through `channel`:
///   sqrt(P_T / N) (sum_i c_i beta_i e^{j phi_i} + c_0 x_0),
/// where the cancellation term is included iff both c_0 and x_0 exist.
Complex aggregate_an_at(const ChannelVector& channel, const AnComponent& an, double p_t);

/// Per-antenna samples sqrt(P_T / N) (e^{j theta_i} + beta_i e^{j phi_i}).
/// The cancellation antenna is not included.
std::vector<Complex> combined_transmit_vector(const PhaseVector& theta, const AnComponent& an,
                                              double p_t);

}  // namespace cesec
