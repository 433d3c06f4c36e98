#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glitchguard/model/config.hpp"
#include "glitchguard/numerics/tensor.hpp"

namespace glitchguard {

struct NamedTensor {
  std::string name;
  Tensor value;

  bool operator==(const NamedTensor&) const = default;
};

struct TrainingMetadata {
  std::uint64_t steps = 0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const TrainingMetadata&) const = default;
};

struct ModelCheckpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  AutoencoderConfig config;
  std::vector<NamedTensor> params;
  TrainingMetadata metadata;

  bool operator==(const ModelCheckpoint&) const = default;

  std::vector<Tensor> tensors() const;
  std::vector<std::string> names() const;
};

struct ParamSlot {
  std::string name;
  Shape shape;
};

// Names and shapes of every trainable tensor, in checkpoint order:
//   enc<i>.weight, enc<i>.bias
//   lstm<l>.w_input, lstm<l>.w_hidden, lstm<l>.bias
//   dec<j>.weight, dec<j>.bias
// Encoder weights are [C_out, C_in, k, k]; decoder (transposed) weights are
// [C_in, C_out, k, k]; LSTM gate blocks are ordered input, forget, output, candidate.
std::vector<ParamSlot> parameter_layout(const AutoencoderConfig& config);

// Glorot-uniform weights, zero biases, LSTM forget-gate biases 1.0.
ModelCheckpoint init_params(const AutoencoderConfig& config);

// Spatial encoder (tanh) per frame -> stacked ConvLSTM over the window ->
// spatial decoder (tanh, final sigmoid) per frame. clip is [W, 1, H, Wd];
// the reconstruction has the same shape with values in [0, 1].
template <typename T>
BasicTensor<T> reconstruct(const AutoencoderConfig& config, std::span<const BasicTensor<T>> params,
                           const BasicTensor<T>& clip);

// MSE reconstruction loss of one clip. Adds scale * dLoss/dparam into grads
// (same layout as params) and returns the unscaled loss.
template <typename T>
T reconstruction_loss(const AutoencoderConfig& config, std::span<const BasicTensor<T>> params,
                      const BasicTensor<T>& clip, std::span<BasicTensor<T>> grads, T scale = T(1));

Tensor forward(const ModelCheckpoint& checkpoint, const Tensor& clip);

// Throws ShapeError unless clip is [window, 1, frame_height, frame_width].
void check_clip_shape(const AutoencoderConfig& config, const Shape& clip_shape);

}  // namespace glitchguard
