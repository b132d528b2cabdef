#include "wmpredict/nn/loss.hpp"

#include <cmath>

#include "wmpredict/error.hpp"

namespace wmp::nn {

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 2) throw Error("softmax: expected [batch, classes]");
  const std::int64_t batch = logits.dim(0), classes = logits.dim(1);
  Tensor out(logits.shape());
  for (std::int64_t b = 0; b < batch; ++b) {
    const double* in = logits.data() + b * classes;
    double* o = out.data() + b * classes;
    double mx = in[0];
    for (std::int64_t c = 1; c < classes; ++c) mx = std::max(mx, in[c]);
    double sum = 0.0;
    for (std::int64_t c = 0; c < classes; ++c) {
      o[c] = std::exp(in[c] - mx);
      sum += o[c];
    }
    for (std::int64_t c = 0; c < classes; ++c) o[c] /= sum;
  }
  return out;
}

LossResult cross_entropy_loss(const Tensor& logits, const std::vector<int>& targets) {
  if (logits.rank() != 2) throw Error("cross_entropy: expected logits [batch, classes]");
  const std::int64_t batch = logits.dim(0), classes = logits.dim(1);
  if (static_cast<std::int64_t>(targets.size()) != batch) {
    throw Error("cross_entropy: " + std::to_string(targets.size()) + " targets for batch " +
                std::to_string(batch));
  }
  if (batch == 0) throw Error("cross_entropy: empty batch");
  for (int t : targets) {
    if (t < 0 || t >= classes) {
      throw Error("cross_entropy: target " + std::to_string(t) + " out of range [0, " +
                  std::to_string(classes) + ")");
    }
  }
  LossResult res;
  res.grad = Tensor(logits.shape());
  double total = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (std::int64_t b = 0; b < batch; ++b) {
    const double* in = logits.data() + b * classes;
    double* g = res.grad.data() + b * classes;
    double mx = in[0];
    for (std::int64_t c = 1; c < classes; ++c) mx = std::max(mx, in[c]);
    double sum = 0.0;
    for (std::int64_t c = 0; c < classes; ++c) sum += std::exp(in[c] - mx);
    const double log_sum = std::log(sum) + mx;
    total += log_sum - in[targets[static_cast<std::size_t>(b)]];
    for (std::int64_t c = 0; c < classes; ++c) {
      const double p = std::exp(in[c] - log_sum);
      g[c] = p * inv_batch;
    }
    g[targets[static_cast<std::size_t>(b)]] -= inv_batch;
  }
  res.value = total * inv_batch;
  return res;
}

LossResult mse_loss(const Tensor& pred, const std::vector<double>& targets) {
  if (pred.rank() != 2 || pred.dim(1) != 1) throw Error("mse: expected predictions [batch, 1]");
  const std::int64_t batch = pred.dim(0);
  if (static_cast<std::int64_t>(targets.size()) != batch) {
    throw Error("mse: " + std::to_string(targets.size()) + " targets for batch " +
                std::to_string(batch));
  }
  if (batch == 0) throw Error("mse: empty batch");
  LossResult res;
  res.grad = Tensor(pred.shape());
  const double inv_batch = 1.0 / static_cast<double>(batch);
  double total = 0.0;
  for (std::int64_t b = 0; b < batch; ++b) {
    const double r = pred[b] - targets[static_cast<std::size_t>(b)];
    total += r * r;
    res.grad[b] = 2.0 * r * inv_batch;
  }
  res.value = total * inv_batch;
  return res;
}

void sgd_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads, double lr) {
  if (params.size() != grads.size()) throw Error("sgd_step: parameter/gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    if (!p.same_shape(g)) {
      throw Error("sgd_step: shape mismatch " + p.shape_str() + " vs " + g.shape_str());
    }
    double* pd = p.data();
    const double* gd = g.data();
    for (std::int64_t j = 0; j < p.numel(); ++j) pd[j] -= lr * gd[j];
  }
}

}  // namespace wmp::nn
