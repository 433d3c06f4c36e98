#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glitchguard/scoring/regularity.hpp"

namespace glitchguard {

inline constexpr std::size_t kDefaultResampleLength = 128;
inline constexpr std::size_t kDefaultMinPts = 3;
inline constexpr long kNoise = -1;

// Fixed-length featurization of an RS curve: the curve resampled to L points
// over normalized time, followed by five summary features.
struct CurveDescriptor {
  std::vector<double> resampled;
  double min_score = 0.0;
  double mean_score = 0.0;
  double fraction_below = 0.0;   // frames with s < 0.5, over all frames
  double segment_count = 0.0;    // anomaly segments at threshold 0.5
  double longest_segment = 0.0;  // longest segment length / frames

  // resampled followed by the summary features; length L + 5.
  std::vector<double> values() const;
};

// Linear interpolation of `values` at L positions spread evenly over [0, N-1].
std::vector<double> resample_linear(std::span<const double> values, std::size_t length);

CurveDescriptor featurize(const RegularityCurve& curve, std::size_t length = kDefaultResampleLength);

double euclidean(std::span<const double> a, std::span<const double> b);

// DBSCAN with Euclidean distance; neighborhoods include the point itself and
// use distance <= eps. Points are visited in index order and clusters are
// numbered in discovery order; border points join the first cluster that
// reaches them. Noise is kNoise.
std::vector<long> dbscan(const std::vector<std::vector<double>>& points, double eps, std::size_t min_pts = kDefaultMinPts);

// Median over points of the distance to each point's k-th nearest other point
// (the farthest other point when fewer than k exist).
double default_eps(const std::vector<std::vector<double>>& points, std::size_t k = 4);

struct ClusterResult {
  std::vector<long> cluster_ids;
  std::map<long, std::string> categories;  // cluster id -> assigned bug category
  double eps = 0.0;
  std::size_t min_pts = kDefaultMinPts;

  std::size_t cluster_count() const;
};

struct LabeledExemplar {
  std::string category;
  std::vector<double> descriptor;
};

// For each cluster, the category of the exemplar with the smallest median
// distance to the cluster's members; exact ties go to the lexicographically
// smallest category. Noise points get no category.
std::map<long, std::string> label_clusters(std::span<const long> cluster_ids,
                                           const std::vector<std::vector<double>>& descriptors,
                                           const std::vector<LabeledExemplar>& exemplars);

// Ground-truth classes C and cluster assignments K over the same items.
struct LabelAssignment {
  std::vector<std::string> classes;
  std::vector<long> clusters;
};

// 1 - H(C|K) / H(C); 1 when H(C) = 0. Each noise item counts as its own
// singleton cluster.
double homogeneity(const LabelAssignment& assignment);

double entropy_of_counts(std::span<const std::size_t> counts);

struct ClusterReportRow {
  std::string video_id;
  long cluster_id = kNoise;
  std::string assigned_category;  // "unassigned" for noise
  std::string true_label;

  bool operator==(const ClusterReportRow&) const = default;
};

struct ClusterReport {
  std::vector<ClusterReportRow> rows;
  std::optional<double> homogeneity;  // footer value, when present
};

inline constexpr const char* kUnassigned = "unassigned";

// CSV video_id,cluster_id,assigned_category,true_label with a trailing
// "# homogeneity=<value>" comment line.
void write_cluster_report(const ClusterReport& report, const std::filesystem::path& path);
ClusterReport read_cluster_report(const std::filesystem::path& path);

// C and K of a report (true labels vs cluster ids).
LabelAssignment assignment_from_report(const ClusterReport& report);

}  // namespace glitchguard
