#include "glitchguard/numerics/convlstm.hpp"

#include <cmath>
#include <string>

#include "glitchguard/error.hpp"

namespace glitchguard {

template <typename T>
void ConvLstmParams<T>::validate() const {
  if (bias.rank() != 1 || bias.size() % kGateCount != 0) {
    throw ShapeError("convlstm bias must be [4*hidden], got " + shape_to_string(bias.shape()));
  }
  const std::size_t hidden = hidden_channels();
  if (w_input.rank() != 4 || w_input.dim(0) != kGateCount * hidden) {
    throw ShapeError("convlstm w_input must be [4*hidden, C_in, k, k] with hidden=" +
                     std::to_string(hidden) + ", got " + shape_to_string(w_input.shape()));
  }
  const std::size_t k = w_input.dim(2);
  if (w_input.dim(3) != k || k % 2 == 0) {
    throw ShapeError("convlstm kernel must be square and odd, got " +
                     shape_to_string(w_input.shape()));
  }
  require_same_shape(Shape{kGateCount * hidden, hidden, k, k}, w_hidden.shape(),
                     "convlstm w_hidden");
}

template <typename T>
ConvSpec ConvLstmParams<T>::input_spec() const {
  return ConvSpec{in_channels(), kGateCount * hidden_channels(), kernel_size(), 1,
                  kernel_size() / 2};
}

template <typename T>
ConvSpec ConvLstmParams<T>::hidden_spec() const {
  return ConvSpec{hidden_channels(), kGateCount * hidden_channels(), kernel_size(), 1,
                  kernel_size() / 2};
}

namespace {

template <typename T>
BasicTensor<T> gate_slice(const BasicTensor<T>& stacked, Gate gate, std::size_t hidden) {
  const std::size_t plane = stacked.dim(1) * stacked.dim(2);
  const std::size_t offset = static_cast<std::size_t>(gate) * hidden * plane;
  BasicTensor<T> out(Shape{hidden, stacked.dim(1), stacked.dim(2)});
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = stacked[offset + i];
  return out;
}

template <typename T>
void write_gate(BasicTensor<T>& stacked, Gate gate, const BasicTensor<T>& values) {
  const std::size_t offset = static_cast<std::size_t>(gate) * values.size();
  for (std::size_t i = 0; i < values.size(); ++i) stacked[offset + i] = values[i];
}

}  // namespace

template <typename T>
ConvLstmStep<T> convlstm_cell_step(const BasicTensor<T>& x, const BasicTensor<T>& h_prev,
                                   const BasicTensor<T>& c_prev, const ConvLstmParams<T>& params) {
  params.validate();
  const std::size_t hidden = params.hidden_channels();
  if (x.rank() != 3) {
    throw ShapeError("convlstm input must be [C,H,W], got " + shape_to_string(x.shape()));
  }
  const Shape state_shape{hidden, x.dim(1), x.dim(2)};
  require_same_shape(state_shape, h_prev.shape(), "convlstm h_prev");
  require_same_shape(state_shape, c_prev.shape(), "convlstm c_prev");

  BasicTensor<T> pre = conv2d_forward(x, params.input_spec(), params.w_input, params.bias);
  const BasicTensor<T> zero_bias(Shape{kGateCount * hidden});
  accumulate(pre, conv2d_forward(h_prev, params.hidden_spec(), params.w_hidden, zero_bias));

  ConvLstmStep<T> step;
  ConvLstmCache<T>& cache = step.cache;
  cache.x = x;
  cache.h_prev = h_prev;
  cache.c_prev = c_prev;
  cache.input_gate = sigmoid_forward(gate_slice(pre, Gate::kInput, hidden));
  cache.forget_gate = sigmoid_forward(gate_slice(pre, Gate::kForget, hidden));
  cache.output_gate = sigmoid_forward(gate_slice(pre, Gate::kOutput, hidden));
  cache.candidate = tanh_forward(gate_slice(pre, Gate::kCandidate, hidden));

  cache.c = BasicTensor<T>(state_shape);
  cache.tanh_c = BasicTensor<T>(state_shape);
  step.h = BasicTensor<T>(state_shape);
  for (std::size_t i = 0; i < cache.c.size(); ++i) {
    cache.c[i] = cache.forget_gate[i] * c_prev[i] + cache.input_gate[i] * cache.candidate[i];
    cache.tanh_c[i] = std::tanh(cache.c[i]);
    step.h[i] = cache.output_gate[i] * cache.tanh_c[i];
  }
  step.c = cache.c;
  return step;
}

template <typename T>
ConvLstmGrads<T> convlstm_cell_backward(const BasicTensor<T>& grad_h, const BasicTensor<T>& grad_c,
                                        const ConvLstmCache<T>& cache,
                                        const ConvLstmParams<T>& params) {
  params.validate();
  const Shape& state_shape = cache.c.shape();
  require_same_shape(state_shape, grad_h.shape(), "convlstm_backward grad_h");
  require_same_shape(state_shape, grad_c.shape(), "convlstm_backward grad_c");
  const std::size_t hidden = params.hidden_channels();

  BasicTensor<T> d_pre(Shape{kGateCount * hidden, state_shape[1], state_shape[2]});
  BasicTensor<T> d_i(state_shape), d_f(state_shape), d_o(state_shape), d_g(state_shape);
  BasicTensor<T> grad_c_prev(state_shape);
  for (std::size_t n = 0; n < cache.c.size(); ++n) {
    const T i = cache.input_gate[n];
    const T f = cache.forget_gate[n];
    const T o = cache.output_gate[n];
    const T g = cache.candidate[n];
    const T tc = cache.tanh_c[n];
    const T dc = grad_c[n] + grad_h[n] * o * (T(1) - tc * tc);
    d_o[n] = grad_h[n] * tc * o * (T(1) - o);
    d_f[n] = dc * cache.c_prev[n] * f * (T(1) - f);
    d_i[n] = dc * g * i * (T(1) - i);
    d_g[n] = dc * i * (T(1) - g * g);
    grad_c_prev[n] = dc * f;
  }
  write_gate(d_pre, Gate::kInput, d_i);
  write_gate(d_pre, Gate::kForget, d_f);
  write_gate(d_pre, Gate::kOutput, d_o);
  write_gate(d_pre, Gate::kCandidate, d_g);

  ConvGrads<T> gx = conv2d_backward(d_pre, cache.x, params.input_spec(), params.w_input);
  ConvGrads<T> gh = conv2d_backward(d_pre, cache.h_prev, params.hidden_spec(), params.w_hidden);
  return ConvLstmGrads<T>{std::move(gx.input),   std::move(gh.input),   std::move(grad_c_prev),
                          std::move(gx.weights), std::move(gh.weights), std::move(gx.bias)};
}

template struct ConvLstmParams<float>;
template struct ConvLstmParams<double>;
template ConvLstmStep<float> convlstm_cell_step(const Tensor&, const Tensor&, const Tensor&,
                                                const ConvLstmParams<float>&);
template ConvLstmStep<double> convlstm_cell_step(const TensorD&, const TensorD&, const TensorD&,
                                                 const ConvLstmParams<double>&);
template ConvLstmGrads<float> convlstm_cell_backward(const Tensor&, const Tensor&,
                                                     const ConvLstmCache<float>&,
                                                     const ConvLstmParams<float>&);
template ConvLstmGrads<double> convlstm_cell_backward(const TensorD&, const TensorD&,
                                                      const ConvLstmCache<double>&,
                                                      const ConvLstmParams<double>&);

}  // namespace glitchguard
