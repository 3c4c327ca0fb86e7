#pragma once

#include <vector>

#include "cesec/channel.h"

namespace cesec {

/// Information-bearing per-antenna phases, each in (-pi, pi].
struct PhaseVector {
  std::vector<double> phases;

  std::size_t size() const { return phases.size(); }
};

struct PrecodeOptions {
  double tolerance = 1e-10;  // on the squared residual
  int max_sweeps = 200;
};

struct PrecodeResult {
  PhaseVector phases;
  double residual = 0.0;  // |u - (1/sqrt(N)) sum h_i e^{j theta_i}|^2
  int iterations = 0;     // coordinate sweeps performed
  bool converged = false;
};

/// Radii describing the annulus of noise-free received values reachable with
/// constant-envelope phases.
struct DoughnutBounds {
  double outer = 0.0;              // M(h) = ||h||_1 / sqrt(N)
  double inner_upper_bound = 0.0;  // ||h||_inf / sqrt(N) >= m(h)
};

DoughnutBounds doughnut_bounds(const ChannelVector& h);

/// (1/sqrt(N)) sum_i h_i e^{j theta_i}. Throws std::invalid_argument on a
/// length mismatch.
Complex synthesize_noise_free(const ChannelVector& h, const PhaseVector& theta);

/// Shifts every phase by psi and wraps into (-pi, pi].
PhaseVector rotate_phases(const PhaseVector& theta, double psi);

/// Finds phases whose noise-free synthesis matches u.
///
/// Cyclic coordinate descent: each coordinate step rotates h_i e^{j theta_i}
/// onto the current residual direction, which is the exact minimizer of the
/// one-phase subproblem. The start point is drawn from `stream`. When
/// |u| >= M(h) the aligned closed-form maximizer is returned directly, which
/// is also the best achievable point for infeasible |u| > M(h).
///
/// Non-convergence is reported through `converged`, not thrown. NaN inputs
/// throw std::invalid_argument.
PrecodeResult precode(Complex u, const ChannelVector& h, const PrecodeOptions& opts,
                      RngStream& stream);

/// Per-antenna transmit samples sqrt(P_T / N) e^{j theta_i}.
std::vector<Complex> ce_transmit_vector(const PhaseVector& theta, double p_t);

}  // namespace cesec
