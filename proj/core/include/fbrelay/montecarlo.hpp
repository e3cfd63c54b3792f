#pragma once

// Frame-level simulation oracle. Each frame draws the three fading gains,
// decides every link decode, and applies the protocol's failure logic.
//
// Frames are split into fixed blocks of kBlockFrames; block b draws from
// RandomStream(seed, b) and block counts are reduced in block order, so the
// estimate depends only on (seed, frames) and never on the worker count.

#include <cstdint>
#include <string_view>

#include "fbrelay/channel.hpp"
#include "fbrelay/protocols.hpp"

namespace fbrelay {

enum class DecodeRule {
  /// Decode fails with probability Q(g(Omega)) (Bernoulli draw).
  outage_probability,
  /// Decode fails iff C(Omega) < R.
  hard_threshold,
};

std::string_view to_string(DecodeRule rule);
DecodeRule parse_decode_rule(std::string_view text);

struct McSettings {
  static constexpr std::uint64_t kMinFrames = 10'000;

  std::uint64_t frames = 10'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  DecodeRule decode_rule = DecodeRule::outage_probability;

  void validate() const;
};

inline constexpr std::uint64_t kBlockFrames = 1u << 16;

/// Binomial estimate with a Wald 95% interval clipped to [0, 1].
struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::uint64_t frames_used = 0;
  std::uint64_t failures = 0;

  static McEstimate from_counts(std::uint64_t failures, std::uint64_t frames);
  bool contains(double p) const noexcept { return p >= ci95_low && p <= ci95_high; }
};

/// End-to-end estimate plus the per-link decode statistics of the same frames.
/// For DT, `sd` is the full-power direct link. `srd` is the combined Z + Y
/// decode, which shares its uniform with the S-D decode.
struct McResult {
  McEstimate end_to_end;
  McEstimate sd;
  McEstimate sr;
  McEstimate rd;
  McEstimate srd;

  OutageReport report(Protocol protocol) const;
};

McResult simulate(const SystemConfig& config, const McSettings& settings);
McEstimate simulate_protocol(const SystemConfig& config, const McSettings& settings);
OutageReport simulate_report(const SystemConfig& config, const McSettings& settings);

/// Per-link decoder with precomputed SNR band outside of which the Bernoulli
/// outcome is certain for any uniform on the (j + 1/2) 2^-53 lattice.
class LinkDecoder {
 public:
  LinkDecoder(double rate, double n, DecodeRule rule);

  bool fails(double snr, double uniform) const;

  double always_fail_below() const noexcept { return always_fail_; }
  double never_fail_above() const noexcept { return never_fail_; }

 private:
  double rate_;
  double n_;
  double threshold_;
  DecodeRule rule_;
  double always_fail_ = 0.0;
  double never_fail_ = 0.0;
};

}  // namespace fbrelay
