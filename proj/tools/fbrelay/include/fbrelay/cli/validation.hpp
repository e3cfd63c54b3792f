#pragma once

// Cross-check of closed form, quadrature and Monte Carlo on one config.

#include <iosfwd>
#include <string>
#include <vector>

#include "fbrelay/channel.hpp"
#include "fbrelay/montecarlo.hpp"
#include "fbrelay/protocols.hpp"

namespace fbrelay::cli {

struct ValidationTolerances {
  double closed_form_relative = 0.01;
  double closed_form_absolute = 1e-6;
  /// Allowed |MC - integral| in standard errors.
  double mc_sigmas = 3.0;
  /// Below this many expected failures the MC check is reported as unresolved.
  double min_expected_failures = 10.0;
};

enum class CheckStatus { pass, fail, unresolved };

struct ValidationCheck {
  Protocol protocol = Protocol::dt;
  std::string name;
  double reference = 0.0;
  double value = 0.0;
  /// Relative gap for closed form, standard errors for MC.
  double discrepancy = 0.0;
  CheckStatus status = CheckStatus::pass;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
};

ValidationReport validate(const SystemConfig& config, const McSettings& mc, const ValidationTolerances& tol = {},
                          const std::vector<Protocol>& protocols = {Protocol::dt, Protocol::df, Protocol::sc,
                                                                    Protocol::mrc});

void print_report(const ValidationReport& report, std::ostream& out);

}  // namespace fbrelay::cli
