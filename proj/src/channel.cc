#include "cesec/channel.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cesec {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed),
      stream_index_(stream_index),
      engine_(mix64(mix64(master_seed) ^ mix64(stream_index + 0x632BE59BD9B4E019ULL))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_phase() {
  // (-pi, pi]: map u in [0, 1) to pi - 2 pi u.
  return std::numbers::pi - 2.0 * std::numbers::pi * uniform();
}

double RngStream::normal() {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  double a, b, s;
  do {
    a = 2.0 * uniform() - 1.0;
    b = 2.0 * uniform() - 1.0;
    s = a * a + b * b;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = b * scale;
  return a * scale;
}

Complex RngStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

RngStream derive_trial_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
  return RngStream(master_seed, trial_index);
}

ChannelVector sample_channel(std::size_t n, bool with_cancel_antenna, RngStream& stream) {
  if (n == 0) throw std::invalid_argument("sample_channel: antenna count must be >= 1");
  ChannelVector h;
  h.gains.resize(n);
  for (auto& g : h.gains) g = stream.complex_normal();
  if (with_cancel_antenna) h.cancel_gain = stream.complex_normal();
  return h;
}

LinkChannels sample_links(std::size_t n, bool with_cancel_antenna, RngStream& stream) {
  LinkChannels links;
  links.user = sample_channel(n, with_cancel_antenna, stream);
  links.eve = sample_channel(n, with_cancel_antenna, stream);
  return links;
}

void validate(const ChannelVector& h) {
  if (h.gains.empty()) throw std::invalid_argument("channel: empty gain vector");
  for (const auto& g : h.gains) {
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
      throw std::invalid_argument("channel: non-finite gain");
    }
  }
  if (h.cancel_gain &&
      (!std::isfinite(h.cancel_gain->real()) || !std::isfinite(h.cancel_gain->imag()))) {
    throw std::invalid_argument("channel: non-finite cancellation gain");
  }
}

void validate(const LinkChannels& links) {
  validate(links.user);
  validate(links.eve);
  if (links.user.size() != links.eve.size()) {
    throw std::invalid_argument("channel: user and eavesdropper lengths differ");
  }
  if (links.user.cancel_gain.has_value() != links.eve.cancel_gain.has_value()) {
    throw std::invalid_argument("channel: cancellation gains must be present together");
  }
}

}  // namespace cesec
