#include "glitchguard/scoring/regularity.hpp"

#include <algorithm>
#include <cmath>

#include "glitchguard/error.hpp"

namespace glitchguard {

std::vector<double> regularity_score(std::span<const double> errors) {
  if (errors.empty()) throw ConfigError("regularity_score needs at least one error value");
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (!std::isfinite(errors[t])) throw NumericError("non-finite reconstruction error at frame " + std::to_string(t));
  }
  const auto [lo, hi] = std::minmax_element(errors.begin(), errors.end());
  const double min_e = *lo;
  const double range = *hi - *lo;
  std::vector<double> scores(errors.size(), 1.0);
  if (range > 0.0) {
    for (std::size_t t = 0; t < errors.size(); ++t) scores[t] = 1.0 - (errors[t] - min_e) / range;
  }
  return scores;
}

std::vector<AnomalySegment> detect_anomalies(std::span<const double> scores, double threshold,
                                             std::size_t merge_gap) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("anomaly threshold must lie in (0, 1)");
  std::vector<AnomalySegment> segments;
  for (std::size_t t = 0; t < scores.size(); ++t) {
    if (!(scores[t] < threshold)) continue;
    if (!segments.empty() && t - segments.back().end - 1 <= merge_gap) {
      segments.back().end = t;
      segments.back().min_score = std::min(segments.back().min_score, scores[t]);
    } else {
      segments.push_back(AnomalySegment{t, t, scores[t], threshold});
    }
  }
  return segments;
}

}  // namespace glitchguard
