#include <algorithm>
#include <cmath>
#include <numeric>

#include "glitchguard/clustering/clustering.hpp"
#include "glitchguard/error.hpp"

namespace glitchguard {

std::vector<double> CurveDescriptor::values() const {
  std::vector<double> out = resampled;
  out.insert(out.end(), {min_score, mean_score, fraction_below, segment_count, longest_segment});
  return out;
}

std::vector<double> resample_linear(std::span<const double> values, std::size_t length) {
  if (values.size() < 2) throw ConfigError("resampling needs at least 2 values");
  if (length < 1) throw ConfigError("resample length must be >= 1");
  const std::size_t last = values.size() - 1;
  std::vector<double> out(length);
  for (std::size_t j = 0; j < length; ++j) {
    const double x = length == 1 ? 0.0
                                 : static_cast<double>(j) * static_cast<double>(last) / static_cast<double>(length - 1);
    const auto i = std::min(static_cast<std::size_t>(x), last - 1);
    const double frac = x - static_cast<double>(i);
    out[j] = frac == 0.0 ? values[i] : values[i] + frac * (values[i + 1] - values[i]);
  }
  return out;
}

CurveDescriptor featurize(const RegularityCurve& curve, std::size_t length) {
  if (curve.scores.size() < 2) {
    throw ConfigError("curve '" + curve.video_id + "' has fewer than 2 frames; cannot featurize");
  }
  const auto& s = curve.scores;
  const double n = static_cast<double>(s.size());
  CurveDescriptor d;
  d.resampled = resample_linear(s, length);
  d.min_score = *std::min_element(s.begin(), s.end());
  d.mean_score = std::accumulate(s.begin(), s.end(), 0.0) / n;
  d.fraction_below =
      static_cast<double>(std::count_if(s.begin(), s.end(), [](double v) { return v < kDefaultThreshold; })) / n;
  const auto segments = detect_anomalies(s, kDefaultThreshold);
  d.segment_count = static_cast<double>(segments.size());
  std::size_t longest = 0;
  for (const auto& seg : segments) longest = std::max(longest, seg.length());
  d.longest_segment = static_cast<double>(longest) / n;
  return d;
}

}  // namespace glitchguard
