#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cesec/channel.h"
#include "cesec/verify/oracles.h"

using cesec::Complex;
using cesec::RngStream;

TEST_CASE("mix64 matches the SplitMix64 reference") {
  // First two outputs of SplitMix64 seeded with 0.
  CHECK(cesec::mix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(cesec::mix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("streams are reproducible") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  auto c = cesec::derive_trial_stream(42, 7);
  auto d = cesec::derive_trial_stream(42, 7);
  for (int i = 0; i < 20; ++i) CHECK(c.complex_normal() == d.complex_normal());
}

TEST_CASE("distinct indices and seeds give distinct streams") {
  RngStream a(1, 0), b(1, 1), c(2, 0);
  const auto x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
  CHECK(x != y);
  CHECK(x != z);
  CHECK(y != z);
}

TEST_CASE("trial stream does not depend on the thread that builds it") {
  std::vector<Complex> main_draws;
  {
    auto s = cesec::derive_trial_stream(7, 3);
    for (int i = 0; i < 10; ++i) main_draws.push_back(s.complex_normal());
  }
  std::vector<Complex> thread_draws;
  std::thread t([&] {
    auto s = cesec::derive_trial_stream(7, 3);
    for (int i = 0; i < 10; ++i) thread_draws.push_back(s.complex_normal());
  });
  t.join();
  CHECK(main_draws == thread_draws);
}

TEST_CASE("uniform draws stay in range") {
  RngStream s(5, 5);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double p = s.uniform_phase();
    CHECK(p > -std::numbers::pi);
    CHECK(p <= std::numbers::pi);
  }
}

TEST_CASE("|h|^2 is Exp(1)") {
  RngStream s(11, 0);
  const auto h = cesec::sample_channel(100000, false, s);
  std::vector<double> mag2;
  double sum = 0.0, sum_re = 0.0, sum_im2 = 0.0;
  for (const auto& g : h.gains) {
    mag2.push_back(std::norm(g));
    sum += std::norm(g);
    sum_re += g.real();
    sum_im2 += g.imag() * g.imag();
  }
  const double n = static_cast<double>(mag2.size());
  CHECK(std::abs(sum / n - 1.0) < 0.02);
  CHECK(std::abs(sum_re / n) < 0.01);
  CHECK(std::abs(sum_im2 / n - 0.5) < 0.01);
  const double ks = cesec::verify::ks_statistic(mag2, [](double x) { return 1.0 - std::exp(-x); });
  CHECK(ks < 0.01);
}

TEST_CASE("||h||^2 is Gamma(N, 1)") {
  constexpr std::size_t n = 16;
  std::vector<double> samples;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    auto s = cesec::derive_trial_stream(99, k);
    const auto h = cesec::sample_channel(n, false, s);
    double e = 0.0;
    for (const auto& g : h.gains) e += std::norm(g);
    samples.push_back(e);
  }
  const double ks = cesec::verify::ks_statistic(
      samples, [](double x) { return cesec::verify::gamma_cdf(static_cast<double>(n), x); });
  CHECK(ks < 0.015);
}

TEST_CASE("first draws across trial streams are independent CN(0,1)") {
  std::vector<double> first;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    auto s = cesec::derive_trial_stream(2024, k);
    first.push_back(std::norm(s.complex_normal()));
  }
  const double ks = cesec::verify::ks_statistic(first, [](double x) { return 1.0 - std::exp(-x); });
  // 1% critical value at n = 1000 is about 0.0515.
  CHECK(ks < 0.0515);
}

TEST_CASE("cancellation gain is optional and paired") {
  RngStream s(3, 3);
  const auto links = cesec::sample_links(8, true, s);
  CHECK(links.user.size() == 8);
  CHECK(links.eve.size() == 8);
  CHECK(links.user.cancel_gain.has_value());
  CHECK(links.eve.cancel_gain.has_value());
  CHECK_NOTHROW(cesec::validate(links));

  const auto plain = cesec::sample_links(8, false, s);
  CHECK_FALSE(plain.user.cancel_gain.has_value());

  cesec::LinkChannels mixed{links.user, plain.eve};
  CHECK_THROWS_AS(cesec::validate(mixed), std::invalid_argument);
}

TEST_CASE("empty channel is rejected") {
  RngStream s(0, 0);
  CHECK_THROWS_AS(cesec::sample_channel(0, false, s), std::invalid_argument);
  CHECK_THROWS_AS(cesec::validate(cesec::ChannelVector{}), std::invalid_argument);
}
