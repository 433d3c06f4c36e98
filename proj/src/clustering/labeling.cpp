#include <algorithm>
#include <limits>

#include "glitchguard/clustering/clustering.hpp"
#include "glitchguard/error.hpp"

namespace glitchguard {

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  return m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

}  // namespace

std::map<long, std::string> label_clusters(std::span<const long> cluster_ids,
                                           const std::vector<std::vector<double>>& descriptors,
                                           const std::vector<LabeledExemplar>& exemplars) {
  if (exemplars.empty()) throw ConfigError("cluster labeling needs at least one exemplar");
  if (cluster_ids.size() != descriptors.size()) {
    throw ShapeError("cluster labeling got " + std::to_string(cluster_ids.size()) + " ids for " +
                     std::to_string(descriptors.size()) + " descriptors");
  }
  std::map<long, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < cluster_ids.size(); ++i) {
    if (cluster_ids[i] != kNoise) members[cluster_ids[i]].push_back(i);
  }

  std::map<long, std::string> labels;
  for (const auto& [cluster, items] : members) {
    double best = std::numeric_limits<double>::infinity();
    std::string best_category;
    for (const auto& ex : exemplars) {
      std::vector<double> dists;
      dists.reserve(items.size());
      for (std::size_t i : items) dists.push_back(euclidean(descriptors[i], ex.descriptor));
      const double d = median(std::move(dists));
      if (d < best || (d == best && ex.category < best_category)) {
        best = d;
        best_category = ex.category;
      }
    }
    labels[cluster] = best_category;
  }
  return labels;
}

}  // namespace glitchguard
