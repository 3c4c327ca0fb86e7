#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cesec/an_generator.h"

namespace cesec {

struct SystemParams {
  double p_t = 1.0;     // total transmit power, linear
  double sigma2 = 1.0;  // receiver noise variance, linear
  std::size_t n_t = 1;
  double eta = 1.0;  // power share of the information signal

  /// P_T = 1 and sigma^2 = 10^(-snr_db / 10).
  static SystemParams from_snr_db(double snr_db, std::size_t n_t, double eta = 1.0);

  double snr() const { return p_t / sigma2; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class Estimator { kClosedForm, kMcLowerBound, kMcUpperBound, kMcEstimate };

const char* to_string(Estimator e);

/// A rate in bits per channel use with estimator metadata.
struct CapacityResult {
  double value = 0.0;
  Estimator estimator = Estimator::kClosedForm;
  std::uint64_t trials = 0;
  double std_error = 0.0;
  std::uint64_t master_seed = 0;
};

struct MonteCarlo {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = automatic
};

/// Raised when an estimator cannot produce a trustworthy value.
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// User, eavesdropper and secrecy rates of one scheme at one operating point.
/// secrecy = [user - eve]^+ on ensemble means.
struct SecrecyReport {
  CapacityResult secrecy;
  CapacityResult user;
  CapacityResult eve;
  /// CE with invisible AN: the eavesdropper bound that ignores AN power and
  /// the secrecy rate it implies.
  std::optional<CapacityResult> trivial_eve;
  std::optional<CapacityResult> trivial_secrecy;
  /// MF with AN: grid point achieving the reported secrecy.
  std::optional<double> best_eta;
  double low_cancel_gain_rate = 0.0;
  double solver_failure_rate = 0.0;
  double mean_cancel_power = 0.0;  // (P_T / N) E|x_0|^2
};

/// E[log2(1 + snr * X)] for X ~ Exp(1), i.e. (1/ln 2) e^{1/snr} E_1(1/snr).
/// Returns 0 for snr == 0.
double ergodic_rayleigh_capacity(double snr);

// ---- closed forms -------------------------------------------------------

/// (1/ln 2) e^{sigma^2/P_T} sum_{n=1}^{N} E_n(sigma^2/P_T).
CapacityResult c_mf(const SystemParams& p);

/// Eavesdropper rate without AN; the same for MF and CE transmission.
CapacityResult c_eve_closed(const SystemParams& p);
inline CapacityResult c_mf_eve(const SystemParams& p) { return c_eve_closed(p); }
inline CapacityResult c_ce_eve(const SystemParams& p) { return c_eve_closed(p); }

/// [C_MF - C_Eve]^+ as a difference of the two closed forms.
CapacityResult c_sec_mf(const SystemParams& p);

/// The same quantity as the partial sum (1/ln 2) e^{x} sum_{k=2}^{N} E_k(x).
double c_sec_mf_partial_sum(const SystemParams& p);

// ---- Monte-Carlo estimators ---------------------------------------------

/// E_h[log2(1 + snr (||h||_1^2 - ||h||_inf^2) / (N e))], a lower bound on
/// the CE user rate.
CapacityResult c_ce_lower_mc(const SystemParams& p, const MonteCarlo& mc);

/// [c_ce_lower_mc - c_eve_closed]^+.
SecrecyReport c_sec_ce(const SystemParams& p, const MonteCarlo& mc);

enum class EveBound {
  kUpper,  // AN power is the received AN; signal power is P_T ||g||^2 / N
  kLower,  // signal power is E|signal + AN|^2 - E|AN|^2
};

enum class LeakagePhase {
  kAnPhase,      // leakage sum uses e^{j phi_i}
  kSignalPhase,  // leakage sum uses e^{j theta_i} (literal variant)
};

struct AnEstimatorOptions {
  bool an_enabled = true;
  EveBound bound = EveBound::kUpper;
  LeakagePhase leakage_phase = LeakagePhase::kAnPhase;
  /// |u| = symbol_radius * M(h) with uniform phase.
  double symbol_radius = 0.5;
  PrecodeOptions precoder;
  Scheme2Options scheme2;
};

/// Eavesdropper rate bound under random-phase AN with leakage cancellation.
/// Power terms are ensemble means over seeded trials; the bound is the
/// Rayleigh ergodic rate at SINR P_u / (P_AN + sigma^2).
CapacityResult eve_upper_bound_scheme2(const SystemParams& p, const MonteCarlo& mc,
                                       const AnEstimatorOptions& opts = {});

/// Secrecy of CE + random AN + cancellation antenna, on common random numbers
/// with the user-side bound.
SecrecyReport secrecy_scheme2_mc(const SystemParams& p, const MonteCarlo& mc,
                                 const AnEstimatorOptions& opts = {});

/// Secrecy of CE + invisible AN. `eve` is the empirical received-AN split;
/// `trivial_eve` / `trivial_secrecy` carry the bound that ignores AN power.
/// Throws EstimatorError when more than 20% of the AN solves fail.
SecrecyReport secrecy_scheme1_mc(const SystemParams& p, const Scheme1Options& scheme1,
                                 const MonteCarlo& mc, const AnEstimatorOptions& opts = {});

/// MF beamforming with isotropic null-space AN, best power split over the
/// grid. Throws std::invalid_argument for N = 1 or an empty grid.
SecrecyReport secrecy_mf_an_opt(const SystemParams& p, const std::vector<double>& eta_grid,
                                const MonteCarlo& mc);

/// {0.05, 0.10, ..., 0.95}.
std::vector<double> default_eta_grid();

// ---- null-space geometry --------------------------------------------------

/// Householder reflector whose first column is parallel to h^dagger. Columns
/// 2..N form an orthonormal basis of the null space of the row vector h.
class NullSpaceProjector {
 public:
  explicit NullSpaceProjector(std::span<const Complex> h);

  std::size_t size() const { return v_.size(); }
  /// ||g V||^2 without forming V.
  double projected_norm2(std::span<const Complex> g) const;
  /// |g h^dagger / ||h|||^2.
  double beam_gain2(std::span<const Complex> g) const;
  /// Explicit N x (N-1) basis, column-major: basis[k][i] = V_{i,k}.
  std::vector<std::vector<Complex>> basis() const;

 private:
  std::vector<Complex> v_;  // reflector direction
  std::vector<Complex> w_;  // h^dagger / ||h||
  double v_norm2_ = 0.0;
};

}  // namespace cesec
