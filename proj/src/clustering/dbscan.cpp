#include <algorithm>
#include <cmath>
#include <deque>

#include "glitchguard/clustering/clustering.hpp"
#include "glitchguard/error.hpp"

namespace glitchguard {

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("distance between vectors of dimension " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

void check_dimensions(const std::vector<std::vector<double>>& points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != points[0].size()) {
      throw ShapeError("point " + std::to_string(i) + " has dimension " + std::to_string(points[i].size()) +
                       ", point 0 has " + std::to_string(points[0].size()));
    }
  }
}

}  // namespace

std::vector<long> dbscan(const std::vector<std::vector<double>>& points, double eps, std::size_t min_pts) {
  if (!(eps > 0.0)) throw ConfigError("dbscan eps must be > 0");
  if (min_pts < 1) throw ConfigError("dbscan min_pts must be >= 1");
  check_dimensions(points);
  const std::size_t n = points.size();

  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (euclidean(points[i], points[j]) <= eps) neighbors[i].push_back(j);
    }
  }

  constexpr long kUnvisited = -2;
  std::vector<long> labels(n, kUnvisited);
  long next_cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    if (neighbors[i].size() < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    const long cluster = next_cluster++;
    labels[i] = cluster;
    std::deque<std::size_t> frontier(neighbors[i].begin(), neighbors[i].end());
    while (!frontier.empty()) {
      const std::size_t q = frontier.front();
      frontier.pop_front();
      if (labels[q] == kNoise) labels[q] = cluster;  // border point
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      if (neighbors[q].size() >= min_pts) {
        frontier.insert(frontier.end(), neighbors[q].begin(), neighbors[q].end());
      }
    }
  }
  return labels;
}

double default_eps(const std::vector<std::vector<double>>& points, std::size_t k) {
  if (points.size() < 2) throw ConfigError("default eps needs at least 2 points");
  if (k < 1) throw ConfigError("k must be >= 1");
  check_dimensions(points);
  std::vector<double> kth;
  kth.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<double> dists;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i) dists.push_back(euclidean(points[i], points[j]));
    }
    std::sort(dists.begin(), dists.end());
    kth.push_back(dists[std::min(k, dists.size()) - 1]);
  }
  std::sort(kth.begin(), kth.end());
  const std::size_t m = kth.size();
  return m % 2 ? kth[m / 2] : 0.5 * (kth[m / 2 - 1] + kth[m / 2]);
}

std::size_t ClusterResult::cluster_count() const {
  long top = -1;
  for (long id : cluster_ids) top = std::max(top, id);
  return static_cast<std::size_t>(top + 1);
}

}  // namespace glitchguard
