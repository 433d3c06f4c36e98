#include "glitchguard/data/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include "glitchguard/error.hpp"

namespace glitchguard {

namespace {

class HeaderScanner {
 public:
  HeaderScanner(const std::string& bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  std::size_t number(const char* field) {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (1u << 24)) fail(std::string(field) + " is implausibly large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail(std::string("missing ") + field);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("no whitespace after maxval");
    }
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw FormatError("malformed PGM header in " + source_ + ": " + why);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const std::string& source_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage parse_pgm(const std::string& bytes, const std::string& source) {
  HeaderScanner scan(bytes, source);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') scan.fail("magic is not P5");
  GrayImage image;
  image.width = scan.number("width");
  image.height = scan.number("height");
  const std::size_t maxval = scan.number("maxval");
  if (image.width == 0 || image.height == 0) scan.fail("zero width or height");
  if (maxval != 255) scan.fail("maxval must be 255, got " + std::to_string(maxval));
  const std::size_t start = scan.raster_start();
  const std::size_t count = image.width * image.height;
  if (bytes.size() < start + count) {
    throw FormatError("PGM raster in " + source + " is truncated: need " + std::to_string(count) +
                      " bytes, have " + std::to_string(bytes.size() - start));
  }
  image.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                      bytes.begin() + static_cast<std::ptrdiff_t>(start + count));
  return image;
}

std::string encode_pgm(const GrayImage& image) {
  if (image.pixels.size() != image.width * image.height) {
    throw FormatError("GrayImage pixel count does not match its dimensions");
  }
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open frame file: " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_pgm(bytes, path.string());
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  const std::string bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open frame file for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing frame file: " + path.string());
}

}  // namespace glitchguard
