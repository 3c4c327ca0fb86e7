#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cesec/special_math.h"

namespace cesec {

/// SplitMix64 finalizer. Fixed, published mixing function used for every
/// seed derivation in the library.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic random stream identified by (master_seed, stream_index).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random>, whose algorithms are implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (-pi, pi].
  double uniform_phase();
  /// Standard real normal via the Marsaglia polar method.
  double normal();
  /// Circularly-symmetric CN(0, 1): real and imaginary parts N(0, 1/2).
  Complex complex_normal();

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// Independent stream for one Monte-Carlo trial; a pure function of its
/// arguments.
RngStream derive_trial_stream(std::uint64_t master_seed, std::uint64_t trial_index);

/// Channel from the array to one single-antenna receiver, plus the optional
/// gain of the extra (non-CE) cancellation antenna.
struct ChannelVector {
  std::vector<Complex> gains;
  std::optional<Complex> cancel_gain;

  std::size_t size() const { return gains.size(); }
  std::span<const Complex> span() const { return gains; }
};

/// Paired user/eavesdropper channels. The cancellation-antenna gains are
/// present on both or on neither.
struct LinkChannels {
  ChannelVector user;
  ChannelVector eve;
};

/// i.i.d. CN(0, 1) gains for n antennas, plus a CN(0, 1) cancellation gain
/// when requested. Throws std::invalid_argument for n == 0.
ChannelVector sample_channel(std::size_t n, bool with_cancel_antenna, RngStream& stream);

/// Draws user then eavesdropper channels from one stream.
LinkChannels sample_links(std::size_t n, bool with_cancel_antenna, RngStream& stream);

/// Validates the ChannelVector invariants. Throws std::invalid_argument.
void validate(const ChannelVector& h);
void validate(const LinkChannels& links);

}  // namespace cesec
