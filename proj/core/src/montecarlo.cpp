#include "fbrelay/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "fbrelay/errors.hpp"

namespace fbrelay {

std::string_view to_string(DecodeRule rule) {
  return rule == DecodeRule::outage_probability ? "outage-probability" : "hard-threshold";
}

DecodeRule parse_decode_rule(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return c == '_' ? '-' : std::tolower(c); });
  if (s == "outage-probability" || s == "bernoulli") return DecodeRule::outage_probability;
  if (s == "hard-threshold" || s == "threshold") return DecodeRule::hard_threshold;
  throw ConfigError("unknown decode rule '" + std::string(text) + "'");
}

void McSettings::validate() const {
  if (frames == 0) throw ConfigError("Monte Carlo needs at least one frame");
  if (frames < kMinFrames) throw ConfigError("Monte Carlo needs at least 10^4 frames for a usable interval");
  if (workers == 0) throw ConfigError("workers must be >= 1");
}

McEstimate McEstimate::from_counts(std::uint64_t failures, std::uint64_t frames) {
  McEstimate e;
  e.frames_used = frames;
  e.failures = failures;
  e.mean = static_cast<double>(failures) / static_cast<double>(frames);
  e.standard_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(frames));
  e.ci95_low = std::max(0.0, e.mean - 1.96 * e.standard_error);
  e.ci95_high = std::min(1.0, e.mean + 1.96 * e.standard_error);
  return e;
}

OutageReport McResult::report(Protocol protocol) const {
  OutageReport r{protocol, Method::monte_carlo};
  switch (protocol) {
    case Protocol::dt:
      r.eps_sd = sd.mean;
      break;
    case Protocol::df:
      r.eps_sr = sr.mean;
      r.eps_rd = rd.mean;
      break;
    case Protocol::sc:
      r.eps_sd = sd.mean;
      r.eps_sr = sr.mean;
      r.eps_rd = rd.mean;
      break;
    case Protocol::mrc:
      r.eps_sd = sd.mean;
      r.eps_sr = sr.mean;
      r.eps_rd = rd.mean;
      r.eps_srd = srd.mean;
      break;
  }
  r.eps_end = end_to_end.mean;
  return r;
}

// ---- decoder -----------------------------------------------------------------

namespace {
// Extremes of RandomStream::uniform().
constexpr double kMinUniform = 0x1.0p-54;
constexpr double kMaxUniform = 1.0 - 0x1.0p-54;

template <typename Pred>
double bisect_boundary(double lo, double hi, Pred holds_at_lo) {
  // Largest t in [lo, hi] with holds_at_lo(t), assuming a single crossing.
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (holds_at_lo(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}
}  // namespace

LinkDecoder::LinkDecoder(double rate, double n, DecodeRule rule)
    : rate_(rate), n_(n), threshold_(std::exp2(rate) - 1.0), rule_(rule) {
  if (rule_ == DecodeRule::hard_threshold) {
    always_fail_ = never_fail_ = threshold_;
    return;
  }
  double upper = 2.0 * threshold_ + 1.0;
  while (awgn_outage(upper, rate_, n_) > kMinUniform) upper *= 2.0;
  never_fail_ = bisect_boundary(threshold_, upper, [&](double t) { return awgn_outage(t, rate_, n_) > kMinUniform; });
  always_fail_ = bisect_boundary(0.0, threshold_, [&](double t) { return awgn_outage(t, rate_, n_) > kMaxUniform; });
}

bool LinkDecoder::fails(double snr, double uniform) const {
  if (rule_ == DecodeRule::hard_threshold) return snr < threshold_;
  if (snr >= never_fail_) return false;
  if (snr <= always_fail_) return true;
  return uniform < awgn_outage(snr, rate_, n_);
}

// ---- simulation ----------------------------------------------------------------

namespace {

struct BlockCounts {
  std::uint64_t end = 0, sd = 0, sr = 0, rd = 0, srd = 0;
};

BlockCounts run_block(const SystemConfig& cfg, const SnrState& avg, const LinkDecoder& src, const LinkDecoder& rly,
                      std::uint64_t seed, std::uint64_t block, std::uint64_t frames) {
  RandomStream stream(seed, block);
  BlockCounts c;
  const bool direct = cfg.protocol == Protocol::dt;
  for (std::uint64_t f = 0; f < frames; ++f) {
    const double ex = stream.unit_exponential();
    const double ey = stream.unit_exponential();
    const double ez = stream.unit_exponential();
    const double u_sd = stream.uniform();
    const double u_sr = stream.uniform();
    const double u_rd = stream.uniform();

    const double omega_x = avg.gamma_x * ex;
    const double omega_y = avg.gamma_y * ey;
    const double omega_z = (direct ? avg.gamma_direct : avg.gamma_z) * ez;

    const bool sd_fail = src.fails(omega_z, u_sd);
    const bool sr_fail = src.fails(omega_x, u_sr);
    const bool rd_fail = rly.fails(omega_y, u_rd);
    const bool srd_fail = rly.fails(omega_z + omega_y, u_sd);

    bool end_fail = false;
    switch (cfg.protocol) {
      case Protocol::dt: end_fail = sd_fail; break;
      case Protocol::df: end_fail = sr_fail || rd_fail; break;
      case Protocol::sc: end_fail = sd_fail && (sr_fail || rd_fail); break;
      case Protocol::mrc: end_fail = sd_fail && (sr_fail || srd_fail); break;
    }
    c.end += end_fail;
    c.sd += sd_fail;
    c.sr += sr_fail;
    c.rd += rd_fail;
    c.srd += srd_fail;
  }
  return c;
}

}  // namespace

McResult simulate(const SystemConfig& config, const McSettings& settings) {
  config.validate();
  settings.validate();
  const SnrState avg = average_snrs(config);
  const LinkDecoder source(config.source_coding().rate(), static_cast<double>(config.n_s), settings.decode_rule);
  const LinkDecoder relay(config.relay_coding().rate(), static_cast<double>(config.n_r), settings.decode_rule);

  const std::uint64_t blocks = (settings.frames + kBlockFrames - 1) / kBlockFrames;
  std::vector<BlockCounts> counts(blocks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
      const std::uint64_t begin = b * kBlockFrames;
      const std::uint64_t size = std::min(kBlockFrames, settings.frames - begin);
      counts[b] = run_block(config, avg, source, relay, settings.seed, b, size);
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(settings.workers, blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  BlockCounts total;
  for (const BlockCounts& c : counts) {
    total.end += c.end;
    total.sd += c.sd;
    total.sr += c.sr;
    total.rd += c.rd;
    total.srd += c.srd;
  }
  const std::uint64_t n = settings.frames;
  return McResult{McEstimate::from_counts(total.end, n), McEstimate::from_counts(total.sd, n),
                  McEstimate::from_counts(total.sr, n), McEstimate::from_counts(total.rd, n),
                  McEstimate::from_counts(total.srd, n)};
}

McEstimate simulate_protocol(const SystemConfig& config, const McSettings& settings) {
  return simulate(config, settings).end_to_end;
}

OutageReport simulate_report(const SystemConfig& config, const McSettings& settings) {
  return simulate(config, settings).report(config.protocol);
}

}  // namespace fbrelay
