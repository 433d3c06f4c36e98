#include "glitchguard/data/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "glitchguard/error.hpp"
#include "glitchguard/numerics/random.hpp"

namespace glitchguard {

namespace {

constexpr const char* kHeader = "video_id,path,split,label,bug_ranges";

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == sep) {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(current);
  return fields;
}

std::size_t parse_index(const std::string& text, const std::string& context) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("bad frame index '" + text + "' in " + context);
  }
  return value;
}

}  // namespace

std::filesystem::path CorpusManifest::resolve(const ManifestRow& row) const {
  const std::filesystem::path p(row.path);
  return p.is_absolute() ? p : base_dir / p;
}

const ManifestRow* CorpusManifest::find(const std::string& video_id) const {
  for (const auto& row : rows) {
    if (row.video_id == video_id) return &row;
  }
  return nullptr;
}

CorpusManifest CorpusManifest::with_split(const std::string& split) const {
  CorpusManifest out{{}, base_dir};
  for (const auto& row : rows) {
    if (row.split == split) out.rows.push_back(row);
  }
  return out;
}

std::string format_ranges(const std::vector<FrameRange>& ranges) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (i) out << ';';
    out << ranges[i].start << '-' << ranges[i].end;
  }
  return out.str();
}

std::vector<FrameRange> parse_ranges(const std::string& text) {
  std::vector<FrameRange> ranges;
  if (text.empty()) return ranges;
  for (const auto& item : split_fields(text, ';')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw FormatError("bug range '" + item + "' is not start-end");
    FrameRange range{parse_index(item.substr(0, dash), "bug range '" + item + "'"),
                     parse_index(item.substr(dash + 1), "bug range '" + item + "'")};
    if (range.end < range.start) throw FormatError("bug range '" + item + "' ends before it starts");
    ranges.push_back(range);
  }
  return ranges;
}

CorpusManifest read_manifest(const std::filesystem::path& path, bool check_paths) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  CorpusManifest manifest;
  manifest.base_dir = path.parent_path();

  std::string line;
  if (!std::getline(in, line) || (line != kHeader && line != std::string(kHeader) + "\r")) {
    throw FormatError("manifest " + path.string() + " must start with header " + kHeader);
  }
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != 5) {
      throw FormatError("manifest line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                        " fields, expected 5");
    }
    ManifestRow row{fields[0], fields[1], fields[2], fields[3], parse_ranges(fields[4])};
    if (row.video_id.empty()) throw FormatError("manifest line " + std::to_string(line_no) + " has no video_id");
    if (!seen.insert(row.video_id).second) {
      throw FormatError("duplicate video_id '" + row.video_id + "' in manifest");
    }
    if (check_paths && !std::filesystem::is_directory(manifest.resolve(row))) {
      throw IoError("manifest row '" + row.video_id + "' points at missing directory " +
                    manifest.resolve(row).string());
    }
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open manifest for writing: " + path.string());
  out << kHeader << '\n';
  for (const auto& row : manifest.rows) {
    for (const std::string* field : {&row.video_id, &row.path, &row.split, &row.label}) {
      if (field->find_first_of(",\n") != std::string::npos) {
        throw FormatError("manifest field '" + *field + "' contains a comma or newline");
      }
    }
    out << row.video_id << ',' << row.path << ',' << row.split << ',' << row.label << ','
        << format_ranges(row.bug_ranges) << '\n';
  }
  if (!out) throw IoError("failed writing manifest: " + path.string());
}

std::pair<CorpusManifest, CorpusManifest> split_corpus(const CorpusManifest& manifest,
                                                       double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = manifest.rows.size();
  if (n < 2) throw ConfigError("splitting needs at least 2 videos, got " + std::to_string(n));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_fraction - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  CorpusManifest train{{}, manifest.base_dir};
  CorpusManifest test{{}, manifest.base_dir};
  for (std::size_t i = 0; i < n; ++i) {
    ManifestRow row = manifest.rows[order[i]];
    if (i < n_train) {
      row.split = "train";
      train.rows.push_back(std::move(row));
    } else {
      row.split = "test";
      test.rows.push_back(std::move(row));
    }
  }
  return {std::move(train), std::move(test)};
}

}  // namespace glitchguard
