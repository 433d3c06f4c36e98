#include "glitchguard/model/config.hpp"

#include <charconv>
#include <sstream>

#include "glitchguard/error.hpp"

namespace glitchguard {

namespace {

std::size_t parse_size(const std::string& text, const std::string& what) {
  std::size_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  parts.push_back(current);
  return parts;
}

}  // namespace

std::string encoder_to_string(const std::vector<EncoderLayer>& layers) {
  std::ostringstream out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out << ',';
    out << layers[i].channels << ':' << layers[i].kernel << ':' << layers[i].stride << ':'
        << layers[i].padding;
  }
  return out.str();
}

std::vector<EncoderLayer> encoder_from_string(const std::string& text) {
  std::vector<EncoderLayer> layers;
  for (const auto& item : split(text, ',')) {
    const auto fields = split(item, ':');
    if (fields.size() != 4) {
      throw ConfigError("encoder layer '" + item + "' must be channels:kernel:stride:padding");
    }
    layers.push_back(EncoderLayer{parse_size(fields[0], "encoder channels"),
                                  parse_size(fields[1], "encoder kernel"),
                                  parse_size(fields[2], "encoder stride"),
                                  parse_size(fields[3], "encoder padding")});
  }
  return layers;
}

std::string sizes_to_string(const std::vector<std::size_t>& sizes) {
  std::ostringstream out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out << ',';
    out << sizes[i];
  }
  return out.str();
}

std::vector<std::size_t> sizes_from_string(const std::string& text) {
  std::vector<std::size_t> sizes;
  for (const auto& item : split(text, ',')) sizes.push_back(parse_size(item, "size list"));
  return sizes;
}

std::vector<ConvSpec> encoder_specs(const AutoencoderConfig& config) {
  std::vector<ConvSpec> specs;
  std::size_t in_channels = 1;
  for (const auto& layer : config.encoder) {
    specs.push_back(ConvSpec{in_channels, layer.channels, layer.kernel, layer.stride, layer.padding});
    in_channels = layer.channels;
  }
  return specs;
}

std::vector<ConvSpec> decoder_specs(const AutoencoderConfig& config) {
  std::vector<ConvSpec> specs;
  std::size_t in_channels = config.lstm_hidden.empty() ? 0 : config.lstm_hidden.back();
  for (std::size_t j = config.encoder.size(); j-- > 0;) {
    const EncoderLayer& mirror = config.encoder[j];
    const std::size_t out_channels = j == 0 ? 1 : config.encoder[j - 1].channels;
    specs.push_back(ConvSpec{in_channels, out_channels, mirror.kernel, mirror.stride, mirror.padding});
    in_channels = out_channels;
  }
  return specs;
}

void AutoencoderConfig::validate() const {
  if (frame_height == 0 || frame_width == 0) throw ConfigError("frame size must be positive");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (encoder.empty()) throw ConfigError("encoder needs at least one layer");
  if (lstm_hidden.empty()) throw ConfigError("lstm_hidden needs at least one layer");
  if (lstm_kernel == 0 || lstm_kernel % 2 == 0) {
    throw ConfigError("lstm_kernel must be odd, got " + std::to_string(lstm_kernel));
  }
  for (std::size_t i = 0; i < lstm_hidden.size(); ++i) {
    if (lstm_hidden[i] == 0) throw ConfigError("lstm" + std::to_string(i + 1) + " has zero channels");
  }

  std::size_t h = frame_height;
  std::size_t w = frame_width;
  const auto enc = encoder_specs(*this);
  for (std::size_t i = 0; i < enc.size(); ++i) {
    const std::string name = "enc" + std::to_string(i + 1);
    if (enc[i].out_channels == 0 || enc[i].kernel_size == 0 || enc[i].stride == 0) {
      throw ConfigError(name + ": channels, kernel and stride must be >= 1");
    }
    try {
      h = conv_output_size(h, enc[i]);
      w = conv_output_size(w, enc[i]);
    } catch (const ShapeError& e) {
      throw ConfigError(name + ": " + e.what());
    }
  }
  const auto dec = decoder_specs(*this);
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const std::string name = "dec" + std::to_string(i + 1);
    try {
      h = deconv_output_size(h, dec[i]);
      w = deconv_output_size(w, dec[i]);
    } catch (const ShapeError& e) {
      throw ConfigError(name + ": " + e.what());
    }
  }
  if (h != frame_height || w != frame_width) {
    throw ConfigError("dec" + std::to_string(dec.size()) + ": output " + std::to_string(h) + "x" +
                      std::to_string(w) + " does not match frame size " +
                      std::to_string(frame_height) + "x" + std::to_string(frame_width));
  }
}

std::string AutoencoderConfig::to_text() const {
  std::ostringstream out;
  out << "frame_height=" << frame_height << '\n'
      << "frame_width=" << frame_width << '\n'
      << "window=" << window << '\n'
      << "encoder=" << encoder_to_string(encoder) << '\n'
      << "lstm_hidden=" << sizes_to_string(lstm_hidden) << '\n'
      << "lstm_kernel=" << lstm_kernel << '\n'
      << "seed=" << seed << '\n';
  return out.str();
}

AutoencoderConfig AutoencoderConfig::from_text(const std::string& text) {
  AutoencoderConfig config;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "frame_height") {
      config.frame_height = parse_size(value, key);
    } else if (key == "frame_width") {
      config.frame_width = parse_size(value, key);
    } else if (key == "window") {
      config.window = parse_size(value, key);
    } else if (key == "encoder") {
      config.encoder = encoder_from_string(value);
    } else if (key == "lstm_hidden") {
      config.lstm_hidden = sizes_from_string(value);
    } else if (key == "lstm_kernel") {
      config.lstm_kernel = parse_size(value, key);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("seed: expected an unsigned integer, got '" + value + "'");
      }
      config.seed = seed;
    } else {
      throw ConfigError("unknown model config key '" + key + "'");
    }
  }
  return config;
}

void TrainingHyper::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("Adam epsilon must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

}  // namespace glitchguard
