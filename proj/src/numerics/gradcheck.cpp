#include "glitchguard/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "glitchguard/error.hpp"

namespace glitchguard {

GradCheckResult gradient_check(const GradientFn& fn, std::vector<double> params, double eps,
                               double floor) {
  if (!(eps > 0.0) || !(floor > 0.0)) {
    throw ConfigError("gradient_check needs eps > 0 and floor > 0");
  }
  std::vector<double> analytic(params.size(), 0.0);
  fn(params, analytic);

  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    const double plus = fn(params, {});
    params[i] = saved - eps;
    const double minus = fn(params, {});
    params[i] = saved;

    const double numeric = (plus - minus) / (2.0 * eps);
    const double err = std::abs(analytic[i] - numeric) / std::max(std::abs(numeric), floor);
    if (!std::isfinite(err)) {
      throw NumericError("gradient_check: non-finite comparison at component " +
                         std::to_string(i));
    }
    if (err > result.max_relative_error || i == 0) {
      result = GradCheckResult{err, i, analytic[i], numeric};
    }
  }
  return result;
}

}  // namespace glitchguard
