#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cesec/special_math.h"
#include "cesec/verify/oracles.h"

using cesec::Complex;

TEST_CASE("E_1(1) matches quadrature and the tabulated value") {
  const double e1 = cesec::gen_exp_integral(1, 1.0);
  CHECK(e1 == doctest::Approx(0.219383934395520).epsilon(1e-12));
  CHECK(e1 == doctest::Approx(cesec::verify::exp_integral_quadrature(1, 1.0)).epsilon(1e-10));
}

TEST_CASE("E_n agrees with quadrature across both evaluation branches") {
  for (int n : {1, 2, 3, 7, 20, 64, 100}) {
    for (double x : {1e-6, 0.01, 0.5, 1.0, 1.0001, 2.5, 10.0, 50.0}) {
      CAPTURE(n);
      CAPTURE(x);
      const double ref = cesec::verify::exp_integral_quadrature(n, x);
      CHECK(cesec::gen_exp_integral(n, x) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("E_2 near zero approaches 1") {
  CHECK(cesec::gen_exp_integral(2, 1e-9) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("recurrence n E_{n+1} = e^{-x} - x E_n holds") {
  for (double x : {0.001, 0.3, 1.0, 4.0, 30.0}) {
    for (int n = 1; n < 128; ++n) {
      const double lhs = n * cesec::gen_exp_integral(n + 1, x);
      const double rhs = std::exp(-x) - x * cesec::gen_exp_integral(n, x);
      CAPTURE(n);
      CAPTURE(x);
      // rhs suffers cancellation when x E_n ~ e^{-x}; compare on the scale of e^{-x}.
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::exp(-x) + 1e-300);
    }
  }
}

TEST_CASE("E_n is decreasing in n and in x") {
  for (double x : {0.05, 1.0, 5.0}) {
    double prev = cesec::gen_exp_integral(1, x);
    for (int n = 2; n <= 50; ++n) {
      const double cur = cesec::gen_exp_integral(n, x);
      CHECK(cur < prev);
      prev = cur;
    }
  }
  for (int n : {1, 3, 10}) {
    double prev = cesec::gen_exp_integral(n, 0.01);
    for (double x = 0.02; x < 20.0; x *= 1.3) {
      const double cur = cesec::gen_exp_integral(n, x);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("scaled forms stay finite where exp(-x) underflows") {
  const double x = 1000.0;
  const double s = cesec::scaled_exp_integral(1, x);
  // e^x E_1(x) ~ 1/x (1 - 1/x + 2/x^2).
  CHECK(s == doctest::Approx(1.0 / x * (1.0 - 1.0 / x + 2.0 / (x * x))).epsilon(1e-8));
  CHECK(cesec::scaled_exp_integral_sum(3, 2, 1.0) == 0.0);
  double manual = 0.0;
  for (int n = 1; n <= 5; ++n) manual += cesec::scaled_exp_integral(n, 0.7);
  CHECK(cesec::scaled_exp_integral_sum(1, 5, 0.7) == doctest::Approx(manual).epsilon(1e-14));
}

TEST_CASE("E_n domain errors") {
  CHECK_THROWS_AS(cesec::gen_exp_integral(0, 1.0), std::domain_error);
  CHECK_THROWS_AS(cesec::gen_exp_integral(1, 0.0), std::domain_error);
  CHECK_THROWS_AS(cesec::gen_exp_integral(2, -1.0), std::domain_error);
}

TEST_CASE("norms of a small vector") {
  const std::vector<Complex> v{{3.0, 4.0}, {0.0, -1.0}, {-2.0, 0.0}};
  CHECK(cesec::norm_1(v) == doctest::Approx(8.0));
  CHECK(cesec::norm_2(v) == doctest::Approx(std::sqrt(30.0)));
  CHECK(cesec::norm_inf(v) == doctest::Approx(5.0));
  const std::vector<Complex> empty;
  CHECK_THROWS_AS(cesec::norm_1(empty), std::invalid_argument);
  CHECK_THROWS_AS(cesec::norm_2(empty), std::invalid_argument);
  CHECK_THROWS_AS(cesec::norm_inf(empty), std::invalid_argument);
}

TEST_CASE("norm ordering inf <= 2 <= 1 <= sqrt(N) * 2") {
  std::vector<Complex> v;
  for (int i = 0; i < 40; ++i) {
    v.emplace_back(std::sin(1.7 * i), std::cos(0.3 * i * i));
    const double n1 = cesec::norm_1(v), n2 = cesec::norm_2(v), ni = cesec::norm_inf(v);
    CHECK(ni <= n2 * (1 + 1e-15));
    CHECK(n2 <= n1 * (1 + 1e-15));
    CHECK(n1 <= std::sqrt(static_cast<double>(v.size())) * n2 * (1 + 1e-15));
  }
}

TEST_CASE("wrap_phase lands in (-pi, pi]") {
  constexpr double pi = std::numbers::pi;
  CHECK(cesec::wrap_phase(pi) == doctest::Approx(pi));
  CHECK(cesec::wrap_phase(-pi) == doctest::Approx(pi));
  CHECK(cesec::wrap_phase(3 * pi / 2) == doctest::Approx(-pi / 2));
  for (double a = -50.0; a < 50.0; a += 0.37) {
    const double w = cesec::wrap_phase(a);
    CHECK(w > -pi);
    CHECK(w <= pi);
    CHECK(std::remainder(w - a, 2 * pi) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  }
}
