#pragma once

#include "hsifuse/dataset.hpp"
#include "hsifuse/nn/checkpoint.hpp"

namespace hsifuse::nn {

// Adam over shuffled mini-batches of the focal loss. Deterministic given the
// config seed; with threads > 1 the per-sample gradients are still reduced in
// sample order, so results match the sequential run bit for bit.
Checkpoint train(const PairDataset& ds_train, const TrainConfig& cfg);

}  // namespace hsifuse::nn
