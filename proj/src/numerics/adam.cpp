#include "glitchguard/numerics/adam.hpp"

#include <cmath>

#include "glitchguard/error.hpp"

namespace glitchguard {

template <typename T>
AdamState<T> AdamState<T>::zeros_like(std::span<const BasicTensor<T>> params) {
  AdamState state;
  for (const auto& p : params) {
    state.first_moment.emplace_back(p.shape());
    state.second_moment.emplace_back(p.shape());
  }
  return state;
}

template <typename T>
void adam_step(std::span<BasicTensor<T>> params, std::span<const BasicTensor<T>> grads,
               AdamState<T>& state, const AdamHyper& hyper, std::span<const std::string> names) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameter blocks but " +
                     std::to_string(grads.size()) + " gradients and " +
                     std::to_string(state.first_moment.size()) + " moment blocks");
  }
  auto block_name = [&](std::size_t b) {
    return b < names.size() ? names[b] : "#" + std::to_string(b);
  };
  for (std::size_t b = 0; b < params.size(); ++b) {
    require_same_shape(params[b].shape(), grads[b].shape(), "adam_step gradient " + block_name(b));
    require_same_shape(params[b].shape(), state.first_moment[b].shape(),
                       "adam_step state " + block_name(b));
    require_same_shape(params[b].shape(), state.second_moment[b].shape(),
                       "adam_step state " + block_name(b));
    if (!grads[b].all_finite()) {
      throw NumericError("non-finite gradient in parameter block " + block_name(b));
    }
  }

  ++state.step;
  const double step = static_cast<double>(state.step);
  const T beta1 = static_cast<T>(hyper.beta1);
  const T beta2 = static_cast<T>(hyper.beta2);
  const T correction1 = static_cast<T>(1.0 - std::pow(hyper.beta1, step));
  const T correction2 = static_cast<T>(1.0 - std::pow(hyper.beta2, step));
  const T lr = static_cast<T>(hyper.learning_rate);
  const T eps = static_cast<T>(hyper.epsilon);

  for (std::size_t b = 0; b < params.size(); ++b) {
    BasicTensor<T>& p = params[b];
    BasicTensor<T>& m = state.first_moment[b];
    BasicTensor<T>& v = state.second_moment[b];
    const BasicTensor<T>& g = grads[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
      v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
      const T m_hat = m[i] / correction1;
      const T v_hat = v[i] / correction2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(std::span<Tensor>, std::span<const Tensor>, AdamState<float>&,
                        const AdamHyper&, std::span<const std::string>);
template void adam_step(std::span<TensorD>, std::span<const TensorD>, AdamState<double>&,
                        const AdamHyper&, std::span<const std::string>);

}  // namespace glitchguard
