#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace glitchguard {

// Scalar objective in double precision. When `grad` is non-empty the function
// must also write its analytic gradient there.
using GradientFn = std::function<double(std::span<const double> params, std::span<double> grad)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;   // at worst_index
};

// Compares the analytic gradient with central differences
// (f(p + eps) - f(p - eps)) / (2 eps) component by component. The relative
// error of a component is |analytic - numeric| / max(|numeric|, floor), so
// components whose true gradient is ~0 are held to an absolute tolerance.
GradCheckResult gradient_check(const GradientFn& fn, std::vector<double> params,
                               double eps = 1e-5, double floor = 1e-4);

}  // namespace glitchguard
