#include "fbrelay/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fbrelay/errors.hpp"

namespace fbrelay {

namespace {
constexpr unsigned kMaxDepth = 24;
constexpr double kSegmentTolerance = 1e-12;
// Values this small are below anything a probability consumer can resolve.
constexpr double kErrorFloor = 1e-18;
}  // namespace

QuadratureResult integrate_segments(const std::function<double(double)>& f, std::vector<double> breakpoints,
                                    const QuadratureTolerance& tolerance) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    // Each segment is mapped onto [0, 1]: the error estimate misbehaves on
    // very narrow intervals.
    const double a = breakpoints[i];
    const double width = breakpoints[i + 1] - a;
    const auto unit = [&](double x) { return width * f(a + width * x); };
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(unit, 0.0, 1.0, kMaxDepth, kSegmentTolerance, &error);
    total.value += value;
    total.error_estimate += error;
  }

  const bool finite = std::isfinite(total.value) && std::isfinite(total.error_estimate);
  const bool abs_ok = total.error_estimate <= tolerance.absolute;
  const bool rel_ok = total.error_estimate <= std::max(tolerance.relative * std::abs(total.value), kErrorFloor);
  if (!finite || !abs_ok || !rel_ok) {
    throw NumericError("adaptive quadrature did not converge", total.value, total.error_estimate);
  }
  return total;
}

}  // namespace fbrelay
