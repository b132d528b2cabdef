#pragma once

#include <vector>

#include "wmpredict/nn/tensor.hpp"

namespace wmp::nn {

struct LossResult {
  double value = 0.0;
  Tensor grad;  // dLoss/dInput, same shape as the loss input
};

// Mean over the batch of -log softmax(logits)[target], stabilized with
// max-subtraction. logits: [batch, classes], targets: class indices.
LossResult cross_entropy_loss(const Tensor& logits, const std::vector<int>& targets);

// Mean squared error over the batch. pred: [batch, 1].
LossResult mse_loss(const Tensor& pred, const std::vector<double>& targets);

// Row-wise softmax of [batch, classes] logits.
Tensor softmax(const Tensor& logits);

// p <- p - lr * g for every parameter/gradient pair. Shapes must match
// pairwise.
void sgd_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads, double lr);

}  // namespace wmp::nn
