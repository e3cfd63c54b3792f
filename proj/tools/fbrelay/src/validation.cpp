#include "fbrelay/cli/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fbrelay::cli {

bool ValidationReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.status == CheckStatus::fail; });
}

ValidationReport validate(const SystemConfig& config, const McSettings& mc, const ValidationTolerances& tol,
                          const std::vector<Protocol>& protocols) {
  ValidationReport report;
  for (Protocol p : protocols) {
    SystemConfig c = config;
    c.protocol = p;
    const double integral = evaluate_outage(c, Method::integral).eps_end;
    const double closed = evaluate_outage(c, Method::closed_form).eps_end;

    ValidationCheck cf{p, "closed_form vs integral", integral, closed};
    const double gap = std::abs(closed - integral);
    cf.discrepancy = integral > 0.0 ? gap / integral : gap;
    cf.status = (gap <= tol.closed_form_absolute || cf.discrepancy <= tol.closed_form_relative) ? CheckStatus::pass
                                                                                                : CheckStatus::fail;
    report.checks.push_back(cf);

    const McEstimate est = simulate_protocol(c, mc);
    ValidationCheck m{p, "monte_carlo vs integral", integral, est.mean};
    const double expected = integral * static_cast<double>(est.frames_used);
    // With few expected failures the binomial error bar is meaningless.
    const double sigma = std::sqrt(integral * (1.0 - integral) / static_cast<double>(est.frames_used));
    m.discrepancy = sigma > 0.0 ? std::abs(est.mean - integral) / sigma : 0.0;
    if (expected < tol.min_expected_failures) {
      m.status = CheckStatus::unresolved;
    } else {
      m.status = m.discrepancy <= tol.mc_sigmas ? CheckStatus::pass : CheckStatus::fail;
    }
    report.checks.push_back(m);
  }
  return report;
}

void print_report(const ValidationReport& report, std::ostream& out) {
  char line[256];
  for (const ValidationCheck& c : report.checks) {
    const char* status = c.status == CheckStatus::pass   ? "PASS"
                         : c.status == CheckStatus::fail ? "FAIL"
                                                         : "UNRESOLVED (insufficient Monte Carlo resolution)";
    const bool mc = c.name.rfind("monte_carlo", 0) == 0;
    std::snprintf(line, sizeof line, "%-4s %-24s reference=%.6e value=%.6e %s=%.4g  %s\n",
                  std::string(to_string(c.protocol)).c_str(), c.name.c_str(), c.reference, c.value,
                  mc ? "sigmas" : "rel_err", c.discrepancy, status);
    out << line;
  }
  out << (report.passed() ? "validation passed\n" : "validation FAILED\n");
}

}  // namespace fbrelay::cli
