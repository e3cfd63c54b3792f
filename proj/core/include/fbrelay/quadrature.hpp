#pragma once

#include <functional>
#include <vector>

namespace fbrelay {

struct QuadratureTolerance {
  double absolute = 1e-10;
  double relative = 1e-6;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod over consecutive breakpoint segments. Breakpoints
/// need not be sorted or unique. Throws NumericError when the summed error
/// estimate misses either tolerance.
QuadratureResult integrate_segments(const std::function<double(double)>& f, std::vector<double> breakpoints,
                                    const QuadratureTolerance& tolerance = {});

}  // namespace fbrelay
