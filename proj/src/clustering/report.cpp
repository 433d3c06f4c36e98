#include <charconv>
#include <fstream>
#include <sstream>

#include "glitchguard/clustering/clustering.hpp"
#include "glitchguard/error.hpp"

namespace glitchguard {

namespace {

constexpr const char* kHeader = "video_id,cluster_id,assigned_category,true_label";
constexpr const char* kFooterKey = "# homogeneity=";

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

void write_cluster_report(const ClusterReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open cluster report for writing: " + path.string());
  out << kHeader << '\n';
  for (const auto& row : report.rows) {
    out << row.video_id << ',' << row.cluster_id << ',' << row.assigned_category << ',' << row.true_label << '\n';
  }
  if (report.homogeneity) out << kFooterKey << shortest(*report.homogeneity) << '\n';
  if (!out) throw IoError("failed writing cluster report: " + path.string());
}

ClusterReport read_cluster_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cluster report: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw FormatError("cluster report " + path.string() + " must start with header " + kHeader);
  }
  ClusterReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.starts_with(kFooterKey)) {
      const std::string value = line.substr(std::string(kFooterKey).size());
      double h = 0.0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), h);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw FormatError("malformed homogeneity footer in " + path.string());
      }
      report.homogeneity = h;
      continue;
    }
    if (line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 4) throw FormatError("cluster report row '" + line + "' needs 4 fields");
    long id = 0;
    auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), id);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size() || id < kNoise) {
      throw FormatError("bad cluster id '" + fields[1] + "' in " + path.string());
    }
    report.rows.push_back({fields[0], id, fields[2], fields[3]});
  }
  return report;
}

LabelAssignment assignment_from_report(const ClusterReport& report) {
  LabelAssignment a;
  for (const auto& row : report.rows) {
    a.classes.push_back(row.true_label);
    a.clusters.push_back(row.cluster_id);
  }
  return a;
}

}  // namespace glitchguard
