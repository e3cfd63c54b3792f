#include "fbrelay/optimizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/spdlog.h>

#include "fbrelay/errors.hpp"

namespace fbrelay {

std::string_view to_string(Regime regime) { return regime == Regime::epa ? "EPA" : "OPA"; }

Regime parse_regime(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "epa") return Regime::epa;
  if (s == "opa") return Regime::opa;
  throw ConfigError("unknown regime '" + std::string(text) + "' (expected epa or opa)");
}

void OptimizerSettings::validate() const {
  if (n_min < CodingSpec::kMinBlocklength) throw ConfigError("n_min must be >= 100");
  if (n_max < n_min) throw ConfigError("n_max must be >= n_min");
  if (!(grid_resolution > 0.0 && grid_resolution <= 0.25)) throw ConfigError("grid resolution must lie in (0, 0.25]");
  if (method == Method::monte_carlo) throw ConfigError("the optimizer needs a deterministic outage method");
  profile.validate();
}

namespace {

struct Point {
  std::int64_t n_s = 0;
  std::int64_t n_r = 0;
  double p = 0.0;
  double eta = 0.5;
};

struct Value {
  double eps = 1.0;
  double ee = 0.0;
};

class Evaluator {
 public:
  Evaluator(const SystemConfig& base, Protocol protocol, const OptimizerSettings& settings)
      : base_(base), settings_(settings) {
    base_.protocol = protocol;
    base_.validate();
    settings_.validate();
  }

  bool direct() const noexcept { return base_.protocol == Protocol::dt; }
  double p_max() const noexcept { return base_.p_total; }
  const OptimizerSettings& settings() const noexcept { return settings_; }

  SystemConfig config(const Point& x) const {
    SystemConfig c = base_;
    c.n_s = x.n_s;
    c.n_r = x.n_r;
    c.p_total = x.p;
    c.eta = direct() ? 1.0 : x.eta;
    return c;
  }

  double eps(const Point& x) {
    ++count;
    return evaluate_outage(config(x), settings_.method).eps_end;
  }

  Value value(const Point& x) {
    ++count;
    const SystemConfig c = config(x);
    const OutageReport r = evaluate_outage(c, settings_.method);
    return {r.eps_end, evaluate_energy(c, settings_.profile, r).ee};
  }

  std::uint64_t count = 0;

 private:
  SystemConfig base_;
  OptimizerSettings settings_;
};

constexpr double kGolden = 0.6180339887498949;

template <typename F>
std::pair<double, double> golden_minimize(F&& f, double a, double b, double tol) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

std::vector<double> eta_grid(double step) {
  std::vector<double> grid;
  const int m = static_cast<int>(std::floor((1.0 - 1e-9) / step));
  for (int i = 1; i <= m; ++i) grid.push_back(i * step);
  if (std::none_of(grid.begin(), grid.end(), [](double e) { return std::abs(e - 0.5) < 1e-12; })) {
    grid.push_back(0.5);
    std::sort(grid.begin(), grid.end());
  }
  return grid;
}

// Count of strict local minima along a grid sequence.
int local_minima(const std::vector<double>& v) {
  int count = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const bool left = i == 0 || v[i] < v[i - 1];
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
    const bool right = j + 1 == v.size() || v[i] < v[j + 1];
    if (left && right && !(i == 0 && j + 1 == v.size())) ++count;
    i = j;
  }
  return count;
}

struct SplitMin {
  double eta = 0.5;
  double eps = 1.0;
  bool unimodal = true;
};

SplitMin minimize_split(Evaluator& ev, Point x, double step) {
  const std::vector<double> grid = eta_grid(step);
  std::vector<double> values;
  values.reserve(grid.size());
  for (double eta : grid) {
    x.eta = eta;
    values.push_back(ev.eps(x));
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  SplitMin out{grid[best], values[best], local_minima(values) <= 1};

  const double lo = best == 0 ? 0.5 * grid.front() : grid[best - 1];
  const double hi = best + 1 == grid.size() ? 0.5 * (1.0 + grid.back()) : grid[best + 1];
  const auto [eta, eps] = golden_minimize(
      [&](double e) {
        x.eta = e;
        return ev.eps(x);
      },
      lo, hi, 1e-7);
  if (eps < out.eps) {
    out.eta = eta;
    out.eps = eps;
  }
  return out;
}

OptimizationResult make_result(Evaluator& ev, const Point& x, bool feasible, Regime regime) {
  const Value v = ev.value(x);
  const SystemConfig c = ev.config(x);
  OptimizationResult r;
  r.protocol = c.protocol;
  r.regime = regime;
  r.n_s_star = x.n_s;
  r.n_r_star = ev.direct() ? 0 : x.n_r;
  r.p_s_star = ev.direct() ? x.p : c.p_source();
  r.p_r_star = ev.direct() ? 0.0 : c.p_relay();
  r.eps_achieved = v.eps;
  r.latency = c.latency();
  r.ee_achieved = v.ee;
  r.feasible = feasible;
  r.evaluations = ev.count;
  return r;
}

void check_probability_target(double eps, const char* name) {
  if (!(eps > 0.0 && eps < 0.5)) throw ConfigError(std::string(name) + " must lie in (0, 0.5)");
}

}  // namespace

// ---- optimal split --------------------------------------------------------------

EtaOptimum optimal_eta(const SystemConfig& config, Protocol protocol, const OptimizerSettings& settings) {
  Evaluator ev(config, protocol, settings);
  const Point x{config.n_s, config.n_r, config.p_total, 0.5};
  if (ev.direct()) return EtaOptimum{1.0, ev.eps(x), true, ev.count};
  const SplitMin m = minimize_split(ev, x, settings.grid_resolution);
  if (!m.unimodal) {
    spdlog::warn("outage of {} is not unimodal in eta on the grid; reporting the best of several minima",
                 to_string(protocol));
  }
  return EtaOptimum{m.eta, m.eps, m.unimodal, ev.count};
}

// ---- latency ------------------------------------------------------------------

OptimizationResult minimize_latency(const SystemConfig& config, Protocol protocol, double eps_target, Regime regime,
                                    const OptimizerSettings& settings) {
  check_probability_target(eps_target, "eps_target");
  Evaluator ev(config, protocol, settings);
  const double step = settings.grid_resolution;

  // Best split at a fixed (n_s, n_r, p).
  auto split = [&](std::int64_t ns, std::int64_t nr, double p) -> SplitMin {
    Point x{ns, nr, p, 0.5};
    if (ev.direct() || regime == Regime::epa) return SplitMin{0.5, ev.eps(x), true};
    return minimize_split(ev, x, step);
  };
  auto feasible = [&](std::int64_t ns, std::int64_t nr) { return split(ns, nr, ev.p_max()).eps <= eps_target; };

  // Smallest n in [lo, hi] with pred(n), given pred(hi).
  auto first_true = [](std::int64_t lo, std::int64_t hi, auto&& pred) {
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (pred(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return hi;
  };

  const std::int64_t n_lo = settings.n_min;
  const std::int64_t n_hi = settings.n_max;
  std::vector<std::pair<std::int64_t, std::int64_t>> ties;

  const bool coupled = ev.direct() || !settings.independent_phases;
  if (coupled) {
    if (!feasible(n_hi, n_hi)) {
      const SplitMin m = split(n_hi, n_hi, ev.p_max());
      return make_result(ev, Point{n_hi, n_hi, ev.p_max(), m.eta}, false, regime);
    }
    const std::int64_t n = first_true(n_lo, n_hi, [&](std::int64_t v) { return feasible(v, v); });
    ties.emplace_back(n, n);
  } else {
    if (!feasible(n_hi, n_hi)) {
      const SplitMin m = split(n_hi, n_hi, ev.p_max());
      return make_result(ev, Point{n_hi, n_hi, ev.p_max(), m.eta}, false, regime);
    }
    // Minimal n_r for a given n_s, or -1.
    auto best_nr = [&](std::int64_t ns) -> std::int64_t {
      if (!feasible(ns, n_hi)) return -1;
      return first_true(n_lo, n_hi, [&](std::int64_t nr) { return feasible(ns, nr); });
    };
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    const std::int64_t coarse = std::max<std::int64_t>(1, (n_hi - n_lo) / 200);
    auto visit = [&](std::int64_t ns) {
      const std::int64_t nr = best_nr(ns);
      if (nr > 0) pairs.emplace_back(ns, nr);
    };
    for (std::int64_t ns = n_lo; ns <= n_hi; ns += coarse) visit(ns);
    if (pairs.empty()) visit(n_hi);
    auto total = [](const auto& pr) { return pr.first + pr.second; };
    const auto lead = *std::min_element(pairs.begin(), pairs.end(),
                                        [&](const auto& a, const auto& b) { return total(a) < total(b); });
    for (std::int64_t ns = std::max(n_lo, lead.first - coarse); ns <= std::min(n_hi, lead.first + coarse); ++ns) {
      visit(ns);
    }
    std::int64_t best_total = total(*std::min_element(
        pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) { return total(a) < total(b); }));
    for (const auto& pr : pairs) {
      if (total(pr) == best_total) ties.push_back(pr);
    }
    std::sort(ties.begin(), ties.end());
    ties.erase(std::unique(ties.begin(), ties.end()), ties.end());
  }

  // Smallest total power that still meets the target; then smaller n_s.
  Point best;
  bool have = false;
  for (const auto& [ns, nr] : ties) {
    double lo = std::log(ev.p_max() * 1e-6);
    double hi = std::log(ev.p_max());
    if (split(ns, nr, std::exp(lo)).eps <= eps_target) {
      hi = lo;
    } else {
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (split(ns, nr, std::exp(mid)).eps <= eps_target) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
    }
    const double p = hi == std::log(ev.p_max()) ? ev.p_max() : std::exp(hi);
    const Point x{ns, nr, p, split(ns, nr, p).eta};
    if (!have || x.p < best.p * (1.0 - 1e-12)) {
      best = x;
      have = true;
    }
  }
  return make_result(ev, best, true, regime);
}

// ---- energy efficiency ------------------------------------------------------------

namespace {

struct Candidate {
  Point x;
  Value v;
  bool feasible = false;
};

// Best power for a fixed (n_s, n_r, eta).
Candidate best_power(Evaluator& ev, Point x, double threshold) {
  x.p = ev.p_max();
  const Value full = ev.value(x);
  if (full.eps > threshold) return Candidate{x, full, false};

  double lo = std::log(ev.p_max() * 1e-6);
  double hi = std::log(ev.p_max());
  x.p = std::exp(lo);
  if (ev.eps(x) <= threshold) {
    hi = lo;
  } else {
    for (int i = 0; i < 56; ++i) {
      const double mid = 0.5 * (lo + hi);
      x.p = std::exp(mid);
      if (ev.eps(x) <= threshold) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  const double log_min = hi;
  const double log_max = std::log(ev.p_max());

  Candidate best{x, full, true};
  best.x.p = ev.p_max();
  auto consider = [&](double log_p) {
    Point y = x;
    y.p = log_p >= log_max ? ev.p_max() : std::exp(log_p);
    const Value v = ev.value(y);
    if (v.eps <= threshold && v.ee > best.v.ee) best = Candidate{y, v, true};
    return -v.ee;
  };
  consider(log_min);
  if (log_max - log_min > 1e-9) golden_minimize(consider, log_min, log_max, 1e-8);
  return best;
}

bool better(const Candidate& a, const Candidate& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) return a.v.eps < b.v.eps;
  if (a.v.ee != b.v.ee) return a.v.ee > b.v.ee;
  return a.x.p < b.x.p;
}

std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, int points) {
  std::vector<std::int64_t> grid;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid.push_back(std::llround(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

Candidate pattern_search(Evaluator& ev, Candidate start, double threshold, Regime regime, double eta_step,
                         std::int64_t dn) {
  const OptimizerSettings& s = ev.settings();
  const bool split_free = !ev.direct() && regime == Regime::opa;
  const bool independent = !ev.direct() && s.independent_phases;
  double deta = split_free ? eta_step : 0.0;
  Candidate cur = start;
  while (true) {
    bool moved = false;
    std::vector<Point> probes;
    auto push_n = [&](std::int64_t dns, std::int64_t dnr) {
      Point y = cur.x;
      y.n_s = std::clamp(y.n_s + dns, s.n_min, s.n_max);
      y.n_r = std::clamp(y.n_r + dnr, s.n_min, s.n_max);
      if (y.n_s != cur.x.n_s || y.n_r != cur.x.n_r) probes.push_back(y);
    };
    if (independent) {
      push_n(dn, 0);
      push_n(-dn, 0);
      push_n(0, dn);
      push_n(0, -dn);
    } else {
      push_n(dn, dn);
      push_n(-dn, -dn);
    }
    if (split_free) {
      for (double d : {deta, -deta}) {
        Point y = cur.x;
        y.eta = std::clamp(y.eta + d, 1e-4, 1.0 - 1e-4);
        if (y.eta != cur.x.eta) probes.push_back(y);
      }
    }
    for (const Point& y : probes) {
      const Candidate c = best_power(ev, y, threshold);
      if (better(c, cur) && (!cur.feasible || c.v.ee > cur.v.ee * (1.0 + 1e-12))) {
        cur = c;
        moved = true;
      }
    }
    if (moved) continue;
    const bool n_done = dn == 1;
    const bool eta_done = !split_free || deta <= 1e-4;
    if (n_done && eta_done) break;
    dn = std::max<std::int64_t>(1, dn / 2);
    if (split_free) deta = std::max(1e-4, deta / 2);
  }
  return cur;
}

Candidate search_ee(Evaluator& ev, double threshold, Regime regime) {
  const OptimizerSettings& s = ev.settings();
  const std::vector<std::int64_t> n_grid = log_grid(s.n_min, s.n_max, 40);
  const double eta_step = std::max(s.grid_resolution, 0.05);
  std::vector<double> etas{0.5};
  if (!ev.direct() && regime == Regime::opa) etas = eta_grid(eta_step);

  std::vector<Candidate> cells;
  for (std::int64_t n : n_grid) {
    for (double eta : etas) cells.push_back(best_power(ev, Point{n, n, ev.p_max(), eta}, threshold));
  }
  std::sort(cells.begin(), cells.end(), better);
  if (!cells.front().feasible) return cells.front();

  Candidate best = cells.front();
  const std::size_t starts = std::min<std::size_t>(3, cells.size());
  for (std::size_t i = 0; i < starts && cells[i].feasible; ++i) {
    const std::int64_t dn = std::max<std::int64_t>(1, cells[i].x.n_s / 8);
    const Candidate c = pattern_search(ev, cells[i], threshold, regime, eta_step, dn);
    if (better(c, best)) best = c;
  }
  return best;
}

}  // namespace

OptimizationResult maximize_ee(const SystemConfig& config, Protocol protocol, double eps_threshold, Regime regime,
                               const OptimizerSettings& settings) {
  check_probability_target(eps_threshold, "eps_threshold");
  if (!(eps_threshold > 1e-5 && eps_threshold < 1e-2)) {
    spdlog::warn("eps_threshold {} is outside the usual (1e-5, 1e-2) interval", eps_threshold);
  }
  Evaluator ev(config, protocol, settings);
  Candidate best = search_ee(ev, eps_threshold, Regime::epa);
  if (regime == Regime::opa && !ev.direct()) {
    const Candidate opa = search_ee(ev, eps_threshold, Regime::opa);
    if (better(opa, best)) best = opa;
  }
  return make_result(ev, best.x, best.feasible, regime);
}

OptimizationResult evaluate_point(const SystemConfig& config, Protocol protocol, std::int64_t n_s, std::int64_t n_r,
                                  double p_s, double p_r, const OptimizerSettings& settings) {
  Evaluator ev(config, protocol, settings);
  const bool direct = protocol == Protocol::dt;
  const double p = direct ? p_s : p_s + p_r;
  if (!(p > 0.0)) throw ConfigError("operating point needs positive power");
  const Point x{n_s, direct ? n_s : n_r, p, direct ? 1.0 : p_s / p};
  OptimizationResult r = make_result(ev, x, true, Regime::opa);
  r.feasible = true;
  return r;
}

}  // namespace fbrelay
