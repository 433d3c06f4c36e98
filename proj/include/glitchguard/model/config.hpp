#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "glitchguard/numerics/layers.hpp"

namespace glitchguard {

// One spatial encoder layer. The decoder mirrors it with a transposed
// convolution of the same kernel/stride/padding.
struct EncoderLayer {
  std::size_t channels = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;

  bool operator==(const EncoderLayer&) const = default;
};

struct AutoencoderConfig {
  std::size_t frame_height = 227;
  std::size_t frame_width = 227;
  std::size_t window = 10;
  std::vector<EncoderLayer> encoder = {{128, 11, 4, 0}, {64, 5, 2, 0}};
  std::vector<std::size_t> lstm_hidden = {64, 32, 64};
  std::size_t lstm_kernel = 3;
  std::uint64_t seed = 0;

  bool operator==(const AutoencoderConfig&) const = default;

  // Checks every layer's shape arithmetic and that the decoder returns to
  // frame size. Throws ConfigError naming the first offending layer.
  void validate() const;

  // key=value lines, one per field, in a fixed order.
  std::string to_text() const;
  // Accepts the output of to_text(); unknown keys are rejected.
  static AutoencoderConfig from_text(const std::string& text);
};

// Conv specs for the encoder and the mirrored decoder, in execution order.
std::vector<ConvSpec> encoder_specs(const AutoencoderConfig& config);
std::vector<ConvSpec> decoder_specs(const AutoencoderConfig& config);

// "channels:kernel:stride:padding" items joined by ','.
std::string encoder_to_string(const std::vector<EncoderLayer>& layers);
std::vector<EncoderLayer> encoder_from_string(const std::string& text);
std::string sizes_to_string(const std::vector<std::size_t>& sizes);
std::vector<std::size_t> sizes_from_string(const std::string& text);

struct TrainingHyper {
  double learning_rate = 1e-3;
  std::size_t batch_size = 4;
  std::size_t max_steps = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  // Clips of one batch are processed on up to this many threads. Gradients
  // are always summed in clip order, so results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
};

}  // namespace glitchguard
