#pragma once

#include "hsifuse/grid.hpp"
#include "hsifuse/nn/tensor.hpp"

namespace hsifuse::nn {

// Per-pixel softmax over the class channel.
Tensor softmax(const Tensor& logits);

// Focal loss: mean over pixels of -(1 - p_t)^gamma * log(p_t), where p_t is
// the softmax probability of the true class. gamma = 0 reduces to plain
// cross-entropy.
double focal_loss(const Tensor& logits, const LabelGrid& labels, double gamma);

// Loss plus dLoss/dlogits in one pass.
double focal_loss_grad(const Tensor& logits, const LabelGrid& labels,
                       double gamma, Tensor& dlogits);

// Per-pixel argmax with ties resolved toward the lower class index.
LabelGrid argmax_labels(const Tensor& logits);

}  // namespace hsifuse::nn
