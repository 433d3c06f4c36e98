#pragma once

#include <cstddef>

#include "glitchguard/numerics/layers.hpp"
#include "glitchguard/numerics/tensor.hpp"

namespace glitchguard {

// Gate blocks are stacked along the output-channel axis in this order.
enum class Gate : std::size_t { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };
inline constexpr std::size_t kGateCount = 4;

// Convolutional LSTM cell parameters. Gate convolutions use stride 1 and
// "same" padding (k/2), so every gate shares the hidden state's spatial size.
//   w_input  [4*hidden, in_channels, k, k]
//   w_hidden [4*hidden, hidden, k, k]
//   bias     [4*hidden]
template <typename T>
struct ConvLstmParams {
  BasicTensor<T> w_input;
  BasicTensor<T> w_hidden;
  BasicTensor<T> bias;

  std::size_t hidden_channels() const { return bias.size() / kGateCount; }
  std::size_t in_channels() const { return w_input.dim(1); }
  std::size_t kernel_size() const { return w_input.dim(2); }

  // Validates shapes (odd kernel, consistent hidden count) or throws ShapeError.
  void validate() const;
  ConvSpec input_spec() const;
  ConvSpec hidden_spec() const;
};

// Everything the backward pass needs from one forward step.
template <typename T>
struct ConvLstmCache {
  BasicTensor<T> x, h_prev, c_prev;
  BasicTensor<T> input_gate, forget_gate, output_gate, candidate;
  BasicTensor<T> c, tanh_c;
};

template <typename T>
struct ConvLstmStep {
  BasicTensor<T> h;
  BasicTensor<T> c;
  ConvLstmCache<T> cache;
};

template <typename T>
struct ConvLstmGrads {
  BasicTensor<T> x, h_prev, c_prev;
  BasicTensor<T> w_input, w_hidden, bias;
};

//   i = sig(Wxi*x + Whi*h + bi)   f, o likewise
//   g = tanh(Wxg*x + Whg*h + bg)
//   c = f.c_prev + i.g            h = o.tanh(c)
template <typename T>
ConvLstmStep<T> convlstm_cell_step(const BasicTensor<T>& x, const BasicTensor<T>& h_prev,
                                   const BasicTensor<T>& c_prev, const ConvLstmParams<T>& params);

// grad_h / grad_c are the loss gradients w.r.t. this step's h and c outputs.
template <typename T>
ConvLstmGrads<T> convlstm_cell_backward(const BasicTensor<T>& grad_h, const BasicTensor<T>& grad_c,
                                        const ConvLstmCache<T>& cache,
                                        const ConvLstmParams<T>& params);

}  // namespace glitchguard
