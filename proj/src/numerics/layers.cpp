#include "glitchguard/numerics/layers.hpp"

#include <string>
#include <vector>

#include "gemm.hpp"
#include "glitchguard/error.hpp"

namespace glitchguard {

std::size_t conv_output_size(std::size_t in, const ConvSpec& spec) {
  if (spec.kernel_size == 0 || spec.stride == 0) {
    throw ShapeError("conv spec needs kernel_size >= 1 and stride >= 1");
  }
  const std::size_t padded = in + 2 * spec.padding;
  if (padded < spec.kernel_size) {
    throw ShapeError("conv kernel " + std::to_string(spec.kernel_size) +
                     " exceeds padded input size " + std::to_string(padded));
  }
  return (padded - spec.kernel_size) / spec.stride + 1;
}

std::size_t deconv_output_size(std::size_t in, const ConvSpec& spec) {
  if (spec.kernel_size == 0 || spec.stride == 0 || in == 0) {
    throw ShapeError("deconv spec needs kernel_size >= 1, stride >= 1 and a non-empty input");
  }
  const std::size_t span = (in - 1) * spec.stride + spec.kernel_size;
  if (span <= 2 * spec.padding) {
    throw ShapeError("deconv padding " + std::to_string(spec.padding) +
                     " removes the whole output (span " + std::to_string(span) + ")");
  }
  return span - 2 * spec.padding;
}

namespace {

struct Geometry {
  std::size_t channels, height, width;  // the "image" side of im2col
  std::size_t out_h, out_w;             // sliding-window positions
  std::size_t k, stride, pad;
};

// col[(c*k + ky)*k + kx][oy*out_w + ox] = image[c][oy*s - p + ky][ox*s - p + kx]
template <typename T>
void im2col(const Geometry& g, const T* image, T* col) {
  const std::size_t positions = g.out_h * g.out_w;
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        T* row = col + ((c * g.k + ky) * g.k + kx) * positions;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long y = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
          T* dst = row + oy * g.out_w;
          if (y < 0 || y >= static_cast<long>(g.height)) {
            for (std::size_t ox = 0; ox < g.out_w; ++ox) dst[ox] = T(0);
            continue;
          }
          const T* src = image + (c * g.height + static_cast<std::size_t>(y)) * g.width;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long x = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
            dst[ox] = (x < 0 || x >= static_cast<long>(g.width)) ? T(0) : src[x];
          }
        }
      }
    }
  }
}

// Inverse scatter of im2col: image += fold(col).
template <typename T>
void col2im(const Geometry& g, const T* col, T* image) {
  const std::size_t positions = g.out_h * g.out_w;
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        const T* row = col + ((c * g.k + ky) * g.k + kx) * positions;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long y = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
          if (y < 0 || y >= static_cast<long>(g.height)) continue;
          T* dst = image + (c * g.height + static_cast<std::size_t>(y)) * g.width;
          const T* src = row + oy * g.out_w;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long x = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
            if (x >= 0 && x < static_cast<long>(g.width)) dst[x] += src[ox];
          }
        }
      }
    }
  }
}

void check_input(const Shape& shape, std::size_t channels, const char* layer) {
  if (shape.size() != 3) {
    throw ShapeError(std::string(layer) + ": input must be [C,H,W], got " + shape_to_string(shape));
  }
  if (shape[0] != channels) {
    throw ShapeError(std::string(layer) + ": input channel dimension is " +
                     std::to_string(shape[0]) + ", spec expects in_channels=" +
                     std::to_string(channels));
  }
}

void check_params(const Shape& weights, const Shape& expected_weights, const Shape& bias,
                  std::size_t bias_len, const char* layer) {
  require_same_shape(expected_weights, weights, std::string(layer) + " weights");
  require_same_shape(Shape{bias_len}, bias, std::string(layer) + " bias");
}

template <typename T>
void add_bias(BasicTensor<T>& out, const BasicTensor<T>& bias) {
  const std::size_t plane = out.size() / bias.size();
  for (std::size_t c = 0; c < bias.size(); ++c) {
    T* dst = out.data() + c * plane;
    for (std::size_t i = 0; i < plane; ++i) dst[i] += bias[c];
  }
}

template <typename T>
BasicTensor<T> channel_sums(const BasicTensor<T>& t) {
  const std::size_t channels = t.dim(0);
  const std::size_t plane = t.size() / channels;
  BasicTensor<T> sums(Shape{channels});
  for (std::size_t c = 0; c < channels; ++c) {
    T acc = T(0);
    const T* src = t.data() + c * plane;
    for (std::size_t i = 0; i < plane; ++i) acc += src[i];
    sums[c] = acc;
  }
  return sums;
}

}  // namespace

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input, const ConvSpec& spec,
                              const BasicTensor<T>& weights, const BasicTensor<T>& bias) {
  check_input(input.shape(), spec.in_channels, "conv2d");
  const std::size_t k = spec.kernel_size;
  check_params(weights.shape(), Shape{spec.out_channels, spec.in_channels, k, k}, bias.shape(),
               spec.out_channels, "conv2d");
  const Geometry g{input.dim(0),
                   input.dim(1),
                   input.dim(2),
                   conv_output_size(input.dim(1), spec),
                   conv_output_size(input.dim(2), spec),
                   k,
                   spec.stride,
                   spec.padding};
  const std::size_t positions = g.out_h * g.out_w;
  const std::size_t patch = spec.in_channels * k * k;
  std::vector<T> col(patch * positions);
  im2col(g, input.data(), col.data());

  BasicTensor<T> out(Shape{spec.out_channels, g.out_h, g.out_w});
  detail::gemm_nn(spec.out_channels, positions, patch, weights.data(), col.data(), out.data());
  add_bias(out, bias);
  return out;
}

template <typename T>
ConvGrads<T> conv2d_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& cached_input,
                             const ConvSpec& spec, const BasicTensor<T>& weights) {
  check_input(cached_input.shape(), spec.in_channels, "conv2d_backward");
  const std::size_t k = spec.kernel_size;
  require_same_shape(Shape{spec.out_channels, spec.in_channels, k, k}, weights.shape(),
                     "conv2d_backward weights");
  const Geometry g{cached_input.dim(0),
                   cached_input.dim(1),
                   cached_input.dim(2),
                   conv_output_size(cached_input.dim(1), spec),
                   conv_output_size(cached_input.dim(2), spec),
                   k,
                   spec.stride,
                   spec.padding};
  require_same_shape(Shape{spec.out_channels, g.out_h, g.out_w}, grad_out.shape(),
                     "conv2d_backward grad_out");
  const std::size_t positions = g.out_h * g.out_w;
  const std::size_t patch = spec.in_channels * k * k;

  std::vector<T> col(patch * positions);
  im2col(g, cached_input.data(), col.data());
  std::vector<T> col_t(col.size());
  detail::transpose(patch, positions, col.data(), col_t.data());

  ConvGrads<T> grads{BasicTensor<T>(cached_input.shape()), BasicTensor<T>(weights.shape()),
                     channel_sums(grad_out)};
  detail::gemm_nn(spec.out_channels, patch, positions, grad_out.data(), col_t.data(),
                  grads.weights.data());

  std::vector<T> grad_col(patch * positions, T(0));
  detail::gemm_tn(patch, positions, spec.out_channels, weights.data(), grad_out.data(),
                  grad_col.data());
  col2im(g, grad_col.data(), grads.input.data());
  return grads;
}

template <typename T>
BasicTensor<T> deconv2d_forward(const BasicTensor<T>& input, const ConvSpec& spec,
                                const BasicTensor<T>& weights, const BasicTensor<T>& bias) {
  check_input(input.shape(), spec.in_channels, "deconv2d");
  const std::size_t k = spec.kernel_size;
  check_params(weights.shape(), Shape{spec.in_channels, spec.out_channels, k, k}, bias.shape(),
               spec.out_channels, "deconv2d");
  const std::size_t out_h = deconv_output_size(input.dim(1), spec);
  const std::size_t out_w = deconv_output_size(input.dim(2), spec);
  const Geometry g{spec.out_channels, out_h, out_w, input.dim(1), input.dim(2),
                   k,                 spec.stride, spec.padding};
  const std::size_t positions = g.out_h * g.out_w;
  const std::size_t patch = spec.out_channels * k * k;

  std::vector<T> col(patch * positions, T(0));
  detail::gemm_tn(patch, positions, spec.in_channels, weights.data(), input.data(), col.data());
  BasicTensor<T> out(Shape{spec.out_channels, out_h, out_w});
  col2im(g, col.data(), out.data());
  add_bias(out, bias);
  return out;
}

template <typename T>
ConvGrads<T> deconv2d_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& cached_input,
                               const ConvSpec& spec, const BasicTensor<T>& weights) {
  check_input(cached_input.shape(), spec.in_channels, "deconv2d_backward");
  const std::size_t k = spec.kernel_size;
  require_same_shape(Shape{spec.in_channels, spec.out_channels, k, k}, weights.shape(),
                     "deconv2d_backward weights");
  const std::size_t out_h = deconv_output_size(cached_input.dim(1), spec);
  const std::size_t out_w = deconv_output_size(cached_input.dim(2), spec);
  require_same_shape(Shape{spec.out_channels, out_h, out_w}, grad_out.shape(),
                     "deconv2d_backward grad_out");
  const Geometry g{spec.out_channels, out_h, out_w, cached_input.dim(1), cached_input.dim(2),
                   k,                 spec.stride, spec.padding};
  const std::size_t positions = g.out_h * g.out_w;
  const std::size_t patch = spec.out_channels * k * k;

  std::vector<T> grad_col(patch * positions);
  im2col(g, grad_out.data(), grad_col.data());

  ConvGrads<T> grads{BasicTensor<T>(cached_input.shape()), BasicTensor<T>(weights.shape()),
                     channel_sums(grad_out)};
  detail::gemm_nn(spec.in_channels, positions, patch, weights.data(), grad_col.data(),
                  grads.input.data());

  std::vector<T> grad_col_t(grad_col.size());
  detail::transpose(patch, positions, grad_col.data(), grad_col_t.data());
  detail::gemm_nn(spec.in_channels, patch, positions, cached_input.data(), grad_col_t.data(),
                  grads.weights.data());
  return grads;
}

template <typename T>
BasicTensor<T> sigmoid_forward(const BasicTensor<T>& x) {
  BasicTensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid(x[i]);
  return out;
}

template <typename T>
BasicTensor<T> sigmoid_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& output) {
  require_same_shape(output.shape(), grad_out.shape(), "sigmoid_backward");
  BasicTensor<T> grad(output.shape());
  for (std::size_t i = 0; i < output.size(); ++i) {
    grad[i] = grad_out[i] * output[i] * (T(1) - output[i]);
  }
  return grad;
}

template <typename T>
BasicTensor<T> tanh_forward(const BasicTensor<T>& x) {
  BasicTensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
  return out;
}

template <typename T>
BasicTensor<T> tanh_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& output) {
  require_same_shape(output.shape(), grad_out.shape(), "tanh_backward");
  BasicTensor<T> grad(output.shape());
  for (std::size_t i = 0; i < output.size(); ++i) {
    grad[i] = grad_out[i] * (T(1) - output[i] * output[i]);
  }
  return grad;
}

template <typename T>
LossResult<T> mse_loss(const BasicTensor<T>& pred, const BasicTensor<T>& target) {
  require_same_shape(target.shape(), pred.shape(), "mse_loss prediction");
  const std::size_t n = pred.size();
  LossResult<T> result{T(0), BasicTensor<T>(pred.shape())};
  double sum = 0.0;
  const T scale = T(2) / static_cast<T>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const T diff = pred[i] - target[i];
    sum += static_cast<double>(diff) * static_cast<double>(diff);
    result.grad[i] = scale * diff;
  }
  result.value = static_cast<T>(sum / static_cast<double>(n));
  return result;
}

template <typename T>
void accumulate(BasicTensor<T>& dst, const BasicTensor<T>& src) {
  require_same_shape(dst.shape(), src.shape(), "accumulate");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

#define GLITCHGUARD_INSTANTIATE_LAYERS(T)                                                      \
  template BasicTensor<T> conv2d_forward(const BasicTensor<T>&, const ConvSpec&,               \
                                         const BasicTensor<T>&, const BasicTensor<T>&);        \
  template ConvGrads<T> conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,          \
                                        const ConvSpec&, const BasicTensor<T>&);               \
  template BasicTensor<T> deconv2d_forward(const BasicTensor<T>&, const ConvSpec&,             \
                                           const BasicTensor<T>&, const BasicTensor<T>&);      \
  template ConvGrads<T> deconv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                          const ConvSpec&, const BasicTensor<T>&);             \
  template BasicTensor<T> sigmoid_forward(const BasicTensor<T>&);                              \
  template BasicTensor<T> sigmoid_backward(const BasicTensor<T>&, const BasicTensor<T>&);      \
  template BasicTensor<T> tanh_forward(const BasicTensor<T>&);                                 \
  template BasicTensor<T> tanh_backward(const BasicTensor<T>&, const BasicTensor<T>&);         \
  template LossResult<T> mse_loss(const BasicTensor<T>&, const BasicTensor<T>&);               \
  template void accumulate(BasicTensor<T>&, const BasicTensor<T>&);

GLITCHGUARD_INSTANTIATE_LAYERS(float)
GLITCHGUARD_INSTANTIATE_LAYERS(double)

#undef GLITCHGUARD_INSTANTIATE_LAYERS

}  // namespace glitchguard
