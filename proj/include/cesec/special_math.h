#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace cesec {

using Complex = std::complex<double>;

/// Generalized exponential integral E_n(x) = int_1^inf exp(-x t) / t^n dt.
///
/// Series expansion for x <= 1, modified Lentz continued fraction otherwise.
/// Each order is evaluated directly, so the result does not depend on any
/// recurrence chain. Throws std::domain_error for n < 1 or x <= 0.
double gen_exp_integral(int n, double x);

/// exp(x) * E_n(x). Stays representable when exp(-x) underflows.
double scaled_exp_integral(int n, double x);

/// exp(x) * sum_{n=first}^{last} E_n(x), accumulated in increasing n.
/// Returns 0 for an empty range (last < first).
double scaled_exp_integral_sum(int first, int last, double x);

// Vector norms over complex entries. Empty input throws std::invalid_argument.
double norm_1(std::span<const Complex> v);
double norm_2(std::span<const Complex> v);
double norm_inf(std::span<const Complex> v);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double radians);

}  // namespace cesec
