#pragma once

// Shared helpers for the test binaries: seeded random tensors and a
// double-precision finite-difference adapter for tensor-valued parameters.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "glitchguard/numerics/gradcheck.hpp"
#include "glitchguard/numerics/random.hpp"
#include "glitchguard/numerics/tensor.hpp"

namespace testing_support {

using glitchguard::Rng;
using glitchguard::Shape;
using glitchguard::TensorD;

inline TensorD random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  TensorD t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

inline glitchguard::Tensor random_tensor_f(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  glitchguard::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

// Flattens a list of tensors into one parameter vector and back.
inline std::vector<double> flatten(const std::vector<TensorD>& tensors) {
  std::vector<double> out;
  for (const auto& t : tensors) out.insert(out.end(), t.values().begin(), t.values().end());
  return out;
}

inline std::vector<TensorD> unflatten(std::span<const double> flat, const std::vector<TensorD>& like) {
  std::vector<TensorD> out;
  std::size_t offset = 0;
  for (const auto& t : like) {
    TensorD copy(t.shape());
    for (std::size_t i = 0; i < copy.size(); ++i) copy[i] = flat[offset + i];
    offset += copy.size();
    out.push_back(std::move(copy));
  }
  return out;
}

// Runs gradient_check over a function of several tensors. `fn` returns the
// scalar value and, when `grads` is non-null, fills gradients shaped like
// its inputs.
using TensorFn = std::function<double(const std::vector<TensorD>&, std::vector<TensorD>* grads)>;

inline glitchguard::GradCheckResult check_tensors(const TensorFn& fn, const std::vector<TensorD>& inputs,
                                                  double eps = 1e-5, double floor = 1e-4) {
  const glitchguard::GradientFn flat_fn = [&](std::span<const double> p, std::span<double> grad) {
    const auto tensors = unflatten(p, inputs);
    if (grad.empty()) return fn(tensors, nullptr);
    std::vector<TensorD> grads;
    const double value = fn(tensors, &grads);
    const auto g = flatten(grads);
    std::copy(g.begin(), g.end(), grad.begin());
    return value;
  };
  return glitchguard::gradient_check(flat_fn, flatten(inputs), eps, floor);
}

// sum(weights .* t): turns a tensor output into a scalar with a generic gradient.
inline double project(const TensorD& t, const TensorD& weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += t[i] * weights[i];
  return s;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("glitchguard_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
