#include "glitchguard/scoring/curve_io.hpp"

#include <charconv>
#include <fstream>

#include "glitchguard/error.hpp"

namespace glitchguard {

namespace {

constexpr const char* kHeader = "frame_index,error,regularity";

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(const std::string& text, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("malformed number '" + text + "' in " + context);
  }
  return v;
}

}  // namespace

void write_curve_csv(const RegularityCurve& curve, const std::filesystem::path& path) {
  if (curve.errors.size() != curve.scores.size()) throw ShapeError("curve has mismatched error/score lengths");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open curve file for writing: " + path.string());
  out << kHeader << '\n';
  for (std::size_t t = 0; t < curve.size(); ++t) {
    out << t << ',' << shortest(curve.errors[t]) << ',' << shortest(curve.scores[t]) << '\n';
  }
  if (!out) throw IoError("failed writing curve file: " + path.string());
}

RegularityCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open curve file: " + path.string());
  RegularityCurve curve;
  curve.video_id = path.stem().string();
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw FormatError("curve file " + path.string() + " must start with header " + kHeader);
  }
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw FormatError("curve file " + path.string() + " row " + std::to_string(row) + " needs 3 fields");
    }
    const std::string context = path.string() + " row " + std::to_string(row);
    if (parse_double(line.substr(0, c1), context) != static_cast<double>(row)) {
      throw FormatError("curve file " + path.string() + " frame indices are not 0,1,2,...");
    }
    curve.errors.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1), context));
    curve.scores.push_back(parse_double(line.substr(c2 + 1), context));
    ++row;
  }
  if (curve.scores.empty()) throw FormatError("curve file " + path.string() + " has no rows");
  return curve;
}

}  // namespace glitchguard
