#pragma once

#include <cmath>
#include <cstddef>

#include "glitchguard/numerics/tensor.hpp"

namespace glitchguard {

// Square-kernel 2-D convolution geometry. Convolution is cross-correlation
// with zero padding; the transposed variant inverts its shape arithmetic.
struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_size = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;

  bool operator==(const ConvSpec&) const = default;
};

// floor((in + 2p - k) / s) + 1; throws ShapeError when that would be < 1.
std::size_t conv_output_size(std::size_t in, const ConvSpec& spec);
// (in - 1) * s - 2p + k; throws ShapeError when that would be < 1.
std::size_t deconv_output_size(std::size_t in, const ConvSpec& spec);

template <typename T>
struct ConvGrads {
  BasicTensor<T> input;
  BasicTensor<T> weights;
  BasicTensor<T> bias;
};

// input [C_in, H, W], weights [C_out, C_in, k, k], bias [C_out] -> [C_out, H', W'].
template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input, const ConvSpec& spec,
                              const BasicTensor<T>& weights, const BasicTensor<T>& bias);

template <typename T>
ConvGrads<T> conv2d_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& cached_input,
                             const ConvSpec& spec, const BasicTensor<T>& weights);

// Transposed convolution. input [C_in, H, W], weights [C_in, C_out, k, k],
// bias [C_out] -> [C_out, (H-1)s-2p+k, (W-1)s-2p+k].
template <typename T>
BasicTensor<T> deconv2d_forward(const BasicTensor<T>& input, const ConvSpec& spec,
                                const BasicTensor<T>& weights, const BasicTensor<T>& bias);

template <typename T>
ConvGrads<T> deconv2d_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& cached_input,
                               const ConvSpec& spec, const BasicTensor<T>& weights);

template <typename T>
inline T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// Elementwise activations. The backward passes take the forward *output*.
template <typename T>
BasicTensor<T> sigmoid_forward(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> sigmoid_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& output);
template <typename T>
BasicTensor<T> tanh_forward(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> tanh_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& output);

template <typename T>
struct LossResult {
  T value{};
  BasicTensor<T> grad;
};

// Mean over all elements of (pred - target)^2, gradient 2(pred - target)/N.
template <typename T>
LossResult<T> mse_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target);

// Adds src into dst elementwise (shapes must match).
template <typename T>
void accumulate(BasicTensor<T>& dst, const BasicTensor<T>& src);

}  // namespace glitchguard
