#include "glitchguard/model/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

namespace glitchguard {

namespace {

constexpr char kMagic[4] = {'G', 'B', 'L', 'D'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t uint(std::size_t width, const char* what) {
    need(width, what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += width;
    return v;
  }

  std::string text(std::size_t length, const char* what) {
    need(length, what);
    std::string s = bytes_.substr(pos_, length);
    pos_ += length;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw TruncatedCheckpointError(std::string("truncated checkpoint: file ends inside ") + what);
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string serialize_checkpoint(const ModelCheckpoint& checkpoint) {
  std::string text = checkpoint.config.to_text();
  text += "train.steps=" + std::to_string(checkpoint.metadata.steps) + "\n";
  text += "train.final_loss=" + format_double(checkpoint.metadata.final_loss) + "\n";
  text += "train.seed=" + std::to_string(checkpoint.metadata.seed) + "\n";

  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, ModelCheckpoint::kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& p : checkpoint.params) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put_u64(out, p.value.size());
    for (float v : p.value.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

ModelCheckpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) || bytes.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0) {
    throw BadMagicError("bad magic: not a GBLD checkpoint");
  }
  Reader in(bytes);
  in.text(sizeof(kMagic), "magic");
  const auto version = static_cast<std::uint32_t>(in.uint(4, "version"));
  if (version != ModelCheckpoint::kFormatVersion) {
    throw VersionMismatchError("checkpoint version mismatch: file has " + std::to_string(version) +
                               ", reader supports " +
                               std::to_string(ModelCheckpoint::kFormatVersion));
  }
  const std::size_t text_len = in.uint(4, "config length");
  const std::string text = in.text(text_len, "config block");

  ModelCheckpoint checkpoint;
  std::string config_text;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    auto parse_u64 = [&](const std::string& value) {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw CheckpointError("malformed metadata line: " + line);
      }
      return v;
    };
    if (line.starts_with("train.steps=")) {
      checkpoint.metadata.steps = parse_u64(line.substr(12));
    } else if (line.starts_with("train.final_loss=")) {
      const std::string value = line.substr(17);
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                       checkpoint.metadata.final_loss);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw CheckpointError("malformed metadata line: " + line);
      }
    } else if (line.starts_with("train.seed=")) {
      checkpoint.metadata.seed = parse_u64(line.substr(11));
    } else {
      config_text += line + "\n";
    }
  }
  try {
    checkpoint.config = AutoencoderConfig::from_text(config_text);
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config block: ") + e.what());
  }

  std::vector<ParamSlot> layout;
  try {
    layout = parameter_layout(checkpoint.config);
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config block: ") + e.what());
  }
  for (const auto& slot : layout) {
    const std::size_t name_len = in.uint(4, "parameter name length");
    const std::string name = in.text(name_len, "parameter name");
    if (name != slot.name) {
      throw CheckpointError("checkpoint parameter '" + name + "' found where '" + slot.name +
                            "' was expected");
    }
    const std::uint64_t count = in.uint(8, "parameter element count");
    if (count != shape_size(slot.shape)) {
      throw CheckpointError("checkpoint parameter '" + name + "' has " + std::to_string(count) +
                            " elements, config implies " + std::to_string(shape_size(slot.shape)));
    }
    Tensor value(slot.shape);
    for (auto& v : value.values()) {
      v = std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4, "parameter values")));
    }
    checkpoint.params.push_back({name, std::move(value)});
  }
  if (!in.at_end()) throw CheckpointError("checkpoint has trailing bytes after the last parameter");
  return checkpoint;
}

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_checkpoint(bytes);
}

}  // namespace glitchguard
