#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "glitchguard/model/autoencoder.hpp"
#include "glitchguard/model/config.hpp"

namespace glitchguard {

struct TrainResult {
  ModelCheckpoint checkpoint;
  std::vector<double> loss_history;  // mean batch loss, one entry per step
};

// Called after every step with (step index, batch loss).
using TrainProgress = std::function<void(std::size_t, double)>;

// Minimizes the MSE reconstruction loss with Adam. Each epoch visits the
// clips in a fresh shuffle seeded from the checkpoint's config seed; a batch
// takes the next batch_size clips of that order, wrapping into the next epoch.
// The batch loss is the mean of per-clip losses.
TrainResult train(const ModelCheckpoint& initial, std::span<const Tensor> clips,
                  const TrainingHyper& hyper, const TrainProgress& progress = {});

}  // namespace glitchguard
