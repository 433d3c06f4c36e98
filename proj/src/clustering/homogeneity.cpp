#include <cmath>
#include <map>

#include "glitchguard/clustering/clustering.hpp"
#include "glitchguard/error.hpp"

namespace glitchguard {

double entropy_of_counts(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

double homogeneity(const LabelAssignment& assignment) {
  const auto& classes = assignment.classes;
  const auto& clusters = assignment.clusters;
  if (classes.size() != clusters.size()) {
    throw ShapeError("homogeneity: " + std::to_string(classes.size()) + " class labels but " +
                     std::to_string(clusters.size()) + " cluster assignments");
  }
  if (classes.empty()) throw ConfigError("homogeneity of an empty assignment is undefined");

  // Noise items become singleton clusters with fresh ids below every real id.
  std::vector<long> k(clusters.begin(), clusters.end());
  long fresh = -2;
  for (auto& id : k) {
    if (id == kNoise) id = fresh--;
  }

  std::map<std::string, std::size_t> class_counts;
  std::map<long, std::map<std::string, std::size_t>> joint;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    ++class_counts[classes[i]];
    ++joint[k[i]][classes[i]];
  }
  std::vector<std::size_t> counts;
  for (const auto& [_, c] : class_counts) counts.push_back(c);
  const double h_c = entropy_of_counts(counts);
  if (h_c == 0.0) return 1.0;

  const double n = static_cast<double>(classes.size());
  double h_c_given_k = 0.0;
  for (const auto& [_, per_class] : joint) {
    double n_k = 0.0;
    for (const auto& [__, c] : per_class) n_k += static_cast<double>(c);
    for (const auto& [__, c] : per_class) {
      const double n_ck = static_cast<double>(c);
      h_c_given_k -= (n_ck / n) * std::log(n_ck / n_k);
    }
  }
  return 1.0 - h_c_given_k / h_c;
}

}  // namespace glitchguard
