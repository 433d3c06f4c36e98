#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glitchguard/numerics/tensor.hpp"

namespace glitchguard {

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  std::uint64_t step = 0;
  std::vector<BasicTensor<T>> first_moment;
  std::vector<BasicTensor<T>> second_moment;

  // Zeroed moments shaped like params.
  static AdamState zeros_like(std::span<const BasicTensor<T>> params);
};

// One bias-corrected Adam update. All blocks are validated before any is
// modified; a non-finite gradient raises NumericError naming the block
// (by `names[i]` when given, else by index).
template <typename T>
void adam_step(std::span<BasicTensor<T>> params, std::span<const BasicTensor<T>> grads,
               AdamState<T>& state, const AdamHyper& hyper,
               std::span<const std::string> names = {});

}  // namespace glitchguard
