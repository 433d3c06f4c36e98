#pragma once

#include <cstdint>
#include <span>

namespace glitchguard {

// Area under the ROC curve for ranking positives (label 1) above negatives by
// score, computed as the Mann-Whitney statistic with ties counted as 1/2.
// Throws ConfigError unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace glitchguard
