#include "cesec/special_math.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cesec {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

void check_domain(int n, double x) {
  if (n < 1) {
    throw std::domain_error("gen_exp_integral: order must be >= 1, got " +
                            std::to_string(n));
  }
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("gen_exp_integral: argument must be finite and > 0");
  }
}

// Continued fraction for exp(x) * E_n(x), valid for x > 1.
double scaled_continued_fraction(int n, double x) {
  const int nm1 = n - 1;
  double b = x + n;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double a = -static_cast<double>(i) * (nm1 + i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("gen_exp_integral: continued fraction did not converge");
}

// Power series for E_n(x), valid for 0 < x <= 1.
double series(int n, double x) {
  const int nm1 = n - 1;
  double ans = nm1 != 0 ? 1.0 / nm1 : -std::log(x) - std::numbers::egamma;
  double fact = 1.0;
  for (int i = 1; i <= kMaxIterations; ++i) {
    fact *= -x / i;
    double del;
    if (i != nm1) {
      del = -fact / (i - nm1);
    } else {
      double psi = -std::numbers::egamma;
      for (int k = 1; k <= nm1; ++k) psi += 1.0 / k;
      del = fact * (-std::log(x) + psi);
    }
    ans += del;
    if (std::abs(del) < std::abs(ans) * kEps) return ans;
  }
  throw std::runtime_error("gen_exp_integral: series did not converge");
}

void require_nonempty(std::span<const Complex> v, const char* what) {
  if (v.empty()) throw std::invalid_argument(std::string(what) + ": empty vector");
}

}  // namespace

double gen_exp_integral(int n, double x) {
  check_domain(n, x);
  if (x > 1.0) return scaled_continued_fraction(n, x) * std::exp(-x);
  return series(n, x);
}

double scaled_exp_integral(int n, double x) {
  check_domain(n, x);
  if (x > 1.0) return scaled_continued_fraction(n, x);
  return series(n, x) * std::exp(x);
}

double scaled_exp_integral_sum(int first, int last, double x) {
  double sum = 0.0;
  for (int n = first; n <= last; ++n) sum += scaled_exp_integral(n, x);
  return sum;
}

double norm_1(std::span<const Complex> v) {
  require_nonempty(v, "norm_1");
  double s = 0.0;
  for (const auto& z : v) s += std::abs(z);
  return s;
}

double norm_2(std::span<const Complex> v) {
  require_nonempty(v, "norm_2");
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double norm_inf(std::span<const Complex> v) {
  require_nonempty(v, "norm_inf");
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

double wrap_phase(double radians) {
  constexpr double kPi = std::numbers::pi;
  double r = std::remainder(radians, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

}  // namespace cesec
