#include "glitchguard/model/train.hpp"

#include <cmath>
#include <numeric>
#include <thread>

#include "glitchguard/error.hpp"
#include "glitchguard/numerics/adam.hpp"
#include "glitchguard/numerics/random.hpp"

namespace glitchguard {

namespace {

// Deterministic clip order: a fresh seeded shuffle per epoch.
class ClipSchedule {
 public:
  ClipSchedule(std::size_t count, std::uint64_t seed) : rng_(mix_seed(seed, 0x747261696eULL)), order_(count) {
    reshuffle();
  }

  std::size_t next() {
    if (cursor_ == order_.size()) reshuffle();
    return order_[cursor_++];
  }

 private:
  void reshuffle() {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    rng_.shuffle(std::span<std::size_t>(order_));
    cursor_ = 0;
  }

  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

std::vector<Tensor> zeros_like(const std::vector<Tensor>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.emplace_back(p.shape());
  return out;
}

}  // namespace

TrainResult train(const ModelCheckpoint& initial, std::span<const Tensor> clips,
                  const TrainingHyper& hyper, const TrainProgress& progress) {
  hyper.validate();
  if (clips.empty()) throw ConfigError("training dataset is empty");
  for (std::size_t i = 0; i < clips.size(); ++i) {
    try {
      check_clip_shape(initial.config, clips[i].shape());
    } catch (const ShapeError& e) {
      throw ShapeError("training clip " + std::to_string(i) + ": " + e.what());
    }
  }

  TrainResult result{initial, {}};
  if (hyper.max_steps == 0) return result;

  const AutoencoderConfig& config = result.checkpoint.config;
  std::vector<Tensor> params = initial.tensors();
  const std::vector<std::string> names = initial.names();
  AdamState<float> adam = AdamState<float>::zeros_like(params);
  const AdamHyper adam_hyper{hyper.learning_rate, hyper.beta1, hyper.beta2, hyper.epsilon};
  ClipSchedule schedule(clips.size(), config.seed);

  const std::size_t batch = hyper.batch_size;
  const std::size_t workers = std::min(hyper.threads, batch);
  const float scale = 1.0f / static_cast<float>(batch);
  std::vector<std::vector<Tensor>> clip_grads(batch, zeros_like(params));
  std::vector<float> clip_losses(batch);
  std::vector<std::size_t> picks(batch);
  std::vector<Tensor> grads = zeros_like(params);

  auto run_clip = [&](std::size_t b) {
    for (auto& g : clip_grads[b]) g.fill(0.0f);
    clip_losses[b] = reconstruction_loss<float>(config, params, clips[picks[b]], clip_grads[b], scale);
  };

  for (std::size_t step = 0; step < hyper.max_steps; ++step) {
    for (auto& p : picks) p = schedule.next();

    if (workers <= 1) {
      for (std::size_t b = 0; b < batch; ++b) run_clip(b);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t b = w; b < batch; b += workers) run_clip(b);
        });
      }
      for (auto& t : pool) t.join();
    }

    // Fixed reduction order keeps training bit-reproducible.
    double loss = 0.0;
    for (auto& g : grads) g.fill(0.0f);
    for (std::size_t b = 0; b < batch; ++b) {
      loss += clip_losses[b];
      for (std::size_t k = 0; k < grads.size(); ++k) accumulate(grads[k], clip_grads[b][k]);
    }
    loss /= static_cast<double>(batch);
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite training loss at step " + std::to_string(step));
    }
    if (hyper.weight_decay > 0.0) {
      const float decay = static_cast<float>(hyper.weight_decay);
      for (std::size_t k = 0; k < grads.size(); ++k) {
        for (std::size_t i = 0; i < grads[k].size(); ++i) grads[k][i] += decay * params[k][i];
      }
    }
    adam_step<float>(params, grads, adam, adam_hyper, names);
    result.loss_history.push_back(loss);
    if (progress) progress(step, loss);
  }

  for (std::size_t k = 0; k < params.size(); ++k) result.checkpoint.params[k].value = std::move(params[k]);
  result.checkpoint.metadata.steps = initial.metadata.steps + hyper.max_steps;
  result.checkpoint.metadata.final_loss = result.loss_history.back();
  result.checkpoint.metadata.seed = config.seed;
  return result;
}

}  // namespace glitchguard
