#pragma once

// Reference computations used to check the library. None of these call the
// routines they are meant to check.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cesec/special_math.h"

namespace cesec::verify {

/// E_n(x) by tanh-sinh/exp-sinh quadrature of the defining integral.
double exp_integral_quadrature(int n, double x);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// E[log2(1 + snr * Z)], Z ~ Gamma(shape, 1), drawn with <random>.
McEstimate log2_one_plus_gamma_mc(double snr, double shape, std::uint64_t trials,
                                  std::uint64_t seed);

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Regularized lower incomplete gamma P(shape, x).
double gamma_cdf(double shape, double x);

struct PhaseGridResult {
  double residual = 0.0;  // min |u - (1/sqrt(N)) sum h_i e^{j theta_i}|^2 over the grid
  std::vector<double> phases;
};

/// Exhaustive search over `levels` uniformly spaced phases per antenna.
/// Meet-in-the-middle: partial sums of the two antenna halves are enumerated
/// and matched with an exact bucketed nearest-neighbour query, so the result
/// equals the brute-force minimum over all levels^N combinations.
PhaseGridResult phase_grid_search(Complex u, std::span<const Complex> h, int levels);

/// Brute-force minimum of |sum h_i cos(theta_i - phi_i) e^{j phi_i}| over a
/// phase grid, restricted to points with sum beta_i^2 >= min_an_power.
double invisibility_grid_min(std::span<const Complex> h, std::span<const double> theta,
                             int levels, double min_an_power);

}  // namespace cesec::verify
