#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cesec/capacity.h"
#include "cesec/verify/oracles.h"

using cesec::Complex;
using cesec::MonteCarlo;
using cesec::SystemParams;

namespace {

double closed_form_reference(std::size_t n, double snr) {
  double s = 0.0;
  const double x = 1.0 / snr;
  for (std::size_t k = 1; k <= n; ++k) {
    s += cesec::verify::exp_integral_quadrature(static_cast<int>(k), x);
  }
  return std::exp(x) * s / std::numbers::ln2;
}

}  // namespace

TEST_CASE("SystemParams") {
  const auto p = SystemParams::from_snr_db(10.0, 4);
  CHECK(p.p_t == 1.0);
  CHECK(p.sigma2 == doctest::Approx(0.1));
  CHECK(p.snr() == doctest::Approx(10.0));
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.n_t = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.sigma2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("c_mf single antenna at 0 dB") {
  const auto r = cesec::c_mf(SystemParams::from_snr_db(0.0, 1));
  CHECK(r.estimator == cesec::Estimator::kClosedForm);
  CHECK(r.std_error == 0.0);
  CHECK(r.value == doctest::Approx(closed_form_reference(1, 1.0)).epsilon(1e-10));
  CHECK(r.value == doctest::Approx(0.8603).epsilon(1e-4));
}

TEST_CASE("c_mf agrees with quadrature and with a Gamma Monte-Carlo") {
  for (std::size_t n : {1u, 4u, 64u}) {
    for (double db : {-10.0, 10.0, 30.0}) {
      const auto p = SystemParams::from_snr_db(db, n);
      CAPTURE(n);
      CAPTURE(db);
      CHECK(cesec::c_mf(p).value ==
            doctest::Approx(closed_form_reference(n, p.snr())).epsilon(1e-9));
    }
  }
  const auto p = SystemParams::from_snr_db(10.0, 8);
  const auto mc = cesec::verify::log2_one_plus_gamma_mc(p.snr(), 8.0, 20000, 17);
  CHECK(std::abs(cesec::c_mf(p).value - mc.mean) <= 3.0 * mc.std_error);
}

TEST_CASE("eavesdropper closed form") {
  for (double db : {-10.0, 0.0, 20.0}) {
    const auto p = SystemParams::from_snr_db(db, 32);
    const auto mc = cesec::verify::log2_one_plus_gamma_mc(p.snr(), 1.0, 100000, 23);
    CHECK(std::abs(cesec::c_eve_closed(p).value - mc.mean) <= 3.0 * mc.std_error);
    CHECK(cesec::c_mf_eve(p).value == cesec::c_ce_eve(p).value);
    CHECK(cesec::c_eve_closed(p).value == cesec::ergodic_rayleigh_capacity(p.snr()));
  }
  CHECK(cesec::ergodic_rayleigh_capacity(0.0) == 0.0);
}

TEST_CASE("low-SNR limit is linear in N snr") {
  for (std::size_t n : {1u, 10u, 100u}) {
    const auto p = SystemParams::from_snr_db(-40.0, n);
    const double linear = static_cast<double>(n) * p.snr() / std::numbers::ln2;
    CHECK(cesec::c_mf(p).value == doctest::Approx(linear).epsilon(1e-3 * n));
  }
}

TEST_CASE("MF secrecy closed forms") {
  CHECK(cesec::c_sec_mf(SystemParams::from_snr_db(20.0, 1)).value == 0.0);
  CHECK(cesec::c_sec_mf_partial_sum(SystemParams::from_snr_db(20.0, 1)) == 0.0);
  for (std::size_t n : {2u, 4u, 64u, 100u}) {
    for (double db : {-10.0, 0.0, 15.0, 40.0}) {
      const auto p = SystemParams::from_snr_db(db, n);
      const double diff = cesec::c_sec_mf(p).value;
      const double partial = cesec::c_sec_mf_partial_sum(p);
      CHECK(diff == doctest::Approx(partial).epsilon(1e-10));
      CHECK(diff >= 0.0);
    }
  }
  // E_k(0) = 1 / (k - 1): the secrecy rate saturates at H_{N-1} / ln 2.
  for (std::size_t n : {2u, 10u, 100u}) {
    double harmonic = 0.0;
    for (std::size_t k = 1; k < n; ++k) harmonic += 1.0 / static_cast<double>(k);
    const double limit = harmonic / std::numbers::ln2;
    const double at80 = cesec::c_sec_mf(SystemParams::from_snr_db(80.0, n)).value;
    CHECK(at80 == doctest::Approx(limit).epsilon(1e-3));
    CHECK(at80 <= limit);
  }
}

TEST_CASE("CE user lower bound") {
  MonteCarlo mc{2000, 5, 1};
  const auto single = cesec::c_ce_lower_mc(SystemParams::from_snr_db(30.0, 1), mc);
  CHECK(single.value == 0.0);

  const auto p = SystemParams::from_snr_db(20.0, 32);
  const auto a = cesec::c_ce_lower_mc(p, MonteCarlo{2000, 1, 1});
  const auto b = cesec::c_ce_lower_mc(p, MonteCarlo{2000, 2, 1});
  CHECK(a.estimator == cesec::Estimator::kMcLowerBound);
  CHECK(a.value != b.value);
  CHECK(std::abs(a.value - b.value) <= 4.0 * std::hypot(a.std_error, b.std_error));
  CHECK(a.value < cesec::c_mf(p).value);

  for (double db : {0.0, 20.0, 40.0}) {
    const auto q = SystemParams::from_snr_db(db, 32);
    CHECK(cesec::c_sec_ce(q, mc).secrecy.value <= cesec::c_sec_mf(q).value);
  }
}

TEST_CASE("estimators reject zero trials") {
  const auto p = SystemParams::from_snr_db(0.0, 4);
  CHECK_THROWS_AS(cesec::c_ce_lower_mc(p, MonteCarlo{0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(cesec::secrecy_scheme2_mc(p, MonteCarlo{0, 0, 1}), std::invalid_argument);
}

TEST_CASE("scheme2 with AN disabled reduces to the no-AN case") {
  const auto p = SystemParams::from_snr_db(20.0, 32);
  const MonteCarlo mc{4000, 9, 1};
  cesec::AnEstimatorOptions off;
  off.an_enabled = false;
  const auto eve = cesec::eve_upper_bound_scheme2(p, mc, off);
  const double closed = cesec::c_eve_closed(p).value;
  CHECK(std::abs(eve.value - closed) <= 3.0 * eve.std_error);

  const auto report = cesec::secrecy_scheme2_mc(p, mc, off);
  const auto baseline = cesec::c_sec_ce(p, mc);
  CHECK(report.user.value == baseline.user.value);
  CHECK(std::abs(report.secrecy.value - baseline.secrecy.value) <=
        3.0 * report.eve.std_error + 1e-12);
}

TEST_CASE("random AN lowers the eavesdropper rate without saturating secrecy") {
  const MonteCarlo mc{400, 31, 1};
  const auto p30 = SystemParams::from_snr_db(30.0, 100);
  const auto r30 = cesec::secrecy_scheme2_mc(p30, mc);
  const double closed = cesec::c_eve_closed(p30).value;
  CHECK(r30.eve.value + 5.0 * r30.eve.std_error < closed);
  CHECK(r30.secrecy.value > cesec::c_sec_ce(p30, mc).secrecy.value);
  CHECK(r30.mean_cancel_power > 0.0);

  const auto r40 = cesec::secrecy_scheme2_mc(SystemParams::from_snr_db(40.0, 100), mc);
  CHECK(r40.secrecy.value > r30.secrecy.value + 1.0);
}

TEST_CASE("scheme2 lower eavesdropper bound sits below the upper bound") {
  const auto p = SystemParams::from_snr_db(10.0, 16);
  const MonteCarlo mc{500, 4, 1};
  cesec::AnEstimatorOptions lower;
  lower.bound = cesec::EveBound::kLower;
  CHECK(cesec::eve_upper_bound_scheme2(p, mc, lower).value <=
        cesec::eve_upper_bound_scheme2(p, mc).value + 1e-12);
}

TEST_CASE("scheme1 reports both eavesdropper evaluations") {
  const auto p = SystemParams::from_snr_db(20.0, 16);
  const MonteCarlo mc{60, 12, 1};
  cesec::Scheme1Options s1;
  s1.an_power_target = 16.0 / 3.0;
  const auto r = cesec::secrecy_scheme1_mc(p, s1, mc);
  const auto baseline = cesec::c_sec_ce(p, mc);
  REQUIRE(r.trivial_secrecy.has_value());
  REQUIRE(r.trivial_eve.has_value());
  CHECK(r.trivial_secrecy->value == baseline.secrecy.value);
  CHECK(r.trivial_eve->value == cesec::c_eve_closed(p).value);
  CHECK(r.secrecy.value >= baseline.secrecy.value);
  CHECK(r.solver_failure_rate <= 0.2);

  s1.an_power_target = 0.0;
  const auto zero = cesec::secrecy_scheme1_mc(p, s1, mc);
  CHECK(std::abs(zero.eve.value - cesec::c_eve_closed(p).value) <= 3.0 * zero.eve.std_error);
  CHECK(zero.trivial_eve->value == cesec::c_eve_closed(p).value);
}

TEST_CASE("MF with null-space AN") {
  const MonteCarlo mc{400, 3, 1};
  const auto p = SystemParams::from_snr_db(20.0, 8);
  const auto full = cesec::secrecy_mf_an_opt(p, {1.0}, mc);
  CHECK(std::abs(full.secrecy.value - cesec::c_sec_mf(p).value) <= 3.0 * full.secrecy.std_error);
  CHECK(cesec::secrecy_mf_an_opt(p, {0.0}, mc).secrecy.value == 0.0);
  CHECK_THROWS_AS(cesec::secrecy_mf_an_opt(SystemParams::from_snr_db(20.0, 1), {0.5}, mc),
                  std::invalid_argument);
  CHECK_THROWS_AS(cesec::secrecy_mf_an_opt(p, {}, mc), std::invalid_argument);

  const auto grid = cesec::default_eta_grid();
  CHECK(grid.size() == 19);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == doctest::Approx(0.95));

  const auto p30 = SystemParams::from_snr_db(30.0, 100);
  const auto r = cesec::secrecy_mf_an_opt(p30, grid, MonteCarlo{200, 8, 1});
  REQUIRE(r.best_eta.has_value());
  CHECK(r.secrecy.value >= cesec::c_sec_mf(p30).value + 5.0 * r.secrecy.std_error);
}

TEST_CASE("null-space projector") {
  cesec::RngStream s(14, 0);
  for (std::size_t n : {2u, 3u, 7u}) {
    const auto h = cesec::sample_channel(n, false, s);
    const auto g = cesec::sample_channel(n, false, s);
    const cesec::NullSpaceProjector proj(h.span());
    const auto basis = proj.basis();
    REQUIRE(basis.size() == n - 1);
    double explicit_norm2 = 0.0;
    for (std::size_t a = 0; a < basis.size(); ++a) {
      Complex hv{0.0, 0.0}, gv{0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        hv += h.gains[i] * basis[a][i];
        gv += g.gains[i] * basis[a][i];
      }
      CHECK(std::abs(hv) < 1e-12);
      explicit_norm2 += std::norm(gv);
      for (std::size_t b = 0; b < basis.size(); ++b) {
        Complex ip{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) ip += std::conj(basis[a][i]) * basis[b][i];
        CHECK(std::abs(ip - Complex(a == b ? 1.0 : 0.0, 0.0)) < 1e-12);
      }
    }
    double g2 = 0.0;
    Complex gh{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      g2 += std::norm(g.gains[i]);
      gh += g.gains[i] * std::conj(h.gains[i]);
    }
    const double beam = std::norm(gh) / std::pow(cesec::norm_2(h.span()), 2);
    CHECK(proj.beam_gain2(g.span()) == doctest::Approx(beam).epsilon(1e-12));
    CHECK(proj.projected_norm2(g.span()) == doctest::Approx(g2 - beam).epsilon(1e-10));
    CHECK(explicit_norm2 == doctest::Approx(g2 - beam).epsilon(1e-10));
  }
}

TEST_CASE("Monte-Carlo results do not depend on the worker count") {
  const auto p = SystemParams::from_snr_db(15.0, 12);
  const auto a = cesec::secrecy_scheme2_mc(p, MonteCarlo{300, 77, 1});
  const auto b = cesec::secrecy_scheme2_mc(p, MonteCarlo{300, 77, 4});
  CHECK(a.secrecy.value == b.secrecy.value);
  CHECK(a.eve.std_error == b.eve.std_error);
  const auto c = cesec::secrecy_mf_an_opt(p, cesec::default_eta_grid(), MonteCarlo{300, 77, 1});
  const auto d = cesec::secrecy_mf_an_opt(p, cesec::default_eta_grid(), MonteCarlo{300, 77, 3});
  CHECK(c.secrecy.value == d.secrecy.value);
  CHECK(c.best_eta == d.best_eta);
}
