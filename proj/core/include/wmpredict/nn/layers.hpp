#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wmpredict/nn/tensor.hpp"
#include "wmpredict/rng.hpp"

namespace wmp::nn {

enum class Mode { Train, Eval };

// A differentiable layer. forward() caches whatever backward() needs, so each
// backward() must be paired with the immediately preceding forward() on the
// same instance. Parameter gradients accumulate until zero_grad().
class Layer {
 public:
  virtual ~Layer() = default;

  virtual const char* kind() const = 0;
  virtual Tensor forward(const Tensor& x) = 0;
  // Takes dLoss/dOutput, returns dLoss/dInput, accumulates parameter grads.
  virtual Tensor backward(const Tensor& grad_out) = 0;

  virtual void set_mode(Mode m) { mode_ = m; }
  Mode mode() const { return mode_; }

  // Trainable tensors and their gradient slots, pairwise aligned. Gradient
  // storage is allocated on first use so inference-only nets stay small.
  virtual std::vector<Tensor*> parameters() { return {}; }
  virtual std::vector<Tensor*> gradients() { return {}; }
  virtual std::vector<std::string> parameter_names() const { return {}; }
  // Non-trainable state that still must be serialized (running stats).
  virtual std::vector<Tensor*> buffers() { return {}; }
  virtual std::vector<std::string> buffer_names() const { return {}; }

  void zero_grad();

 protected:
  Mode mode_ = Mode::Train;
};

// Valid (unpadded) 1D cross-correlation, stride fixed at 1.
// [batch, ch_in, len] -> [batch, ch_out, len - kernel + 1].
class Conv1d : public Layer {
 public:
  Conv1d(std::int64_t ch_in, std::int64_t ch_out, std::int64_t kernel, Rng& rng);

  const char* kind() const override { return "conv1d"; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<Tensor*> parameters() override { return {&weight_, &bias_}; }
  std::vector<Tensor*> gradients() override;
  std::vector<std::string> parameter_names() const override { return {"weight", "bias"}; }

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  std::int64_t ch_in_, ch_out_, kernel_;
  Tensor weight_;  // [ch_out, ch_in, kernel]
  Tensor bias_;    // [ch_out]
  Tensor grad_weight_, grad_bias_;
  Tensor input_;
};

// 3x3 2D cross-correlation with zero padding 1 and stride 1; spatial shape is
// preserved. [batch, ch_in, h, w] -> [batch, ch_out, h, w].
class Conv2d : public Layer {
 public:
  Conv2d(std::int64_t ch_in, std::int64_t ch_out, std::int64_t kernel, std::int64_t padding,
         Rng& rng);

  const char* kind() const override { return "conv2d"; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<Tensor*> parameters() override { return {&weight_, &bias_}; }
  std::vector<Tensor*> gradients() override;
  std::vector<std::string> parameter_names() const override { return {"weight", "bias"}; }

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  std::int64_t ch_in_, ch_out_, kernel_, padding_;
  Tensor weight_;  // [ch_out, ch_in, kernel, kernel]
  Tensor bias_;    // [ch_out]
  Tensor grad_weight_, grad_bias_;
  Tensor input_;
};

// Per-channel batch normalization over dim 1 of a [batch, channels, ...]
// tensor. Train mode normalizes with batch statistics and updates running
// stats (momentum 0.1, unbiased running variance); eval mode uses the running
// stats.
class BatchNorm : public Layer {
 public:
  explicit BatchNorm(std::int64_t channels, double epsilon = 1e-5, double momentum = 0.1);

  const char* kind() const override { return "batchnorm"; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<Tensor*> parameters() override { return {&gamma_, &beta_}; }
  std::vector<Tensor*> gradients() override;
  std::vector<std::string> parameter_names() const override { return {"gamma", "beta"}; }
  std::vector<Tensor*> buffers() override { return {&running_mean_, &running_var_}; }
  std::vector<std::string> buffer_names() const override {
    return {"running_mean", "running_var"};
  }

  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }
  const Tensor& running_mean() const { return running_mean_; }
  const Tensor& running_var() const { return running_var_; }

 private:
  std::int64_t channels_;
  double epsilon_, momentum_;
  Tensor gamma_, beta_;
  Tensor running_mean_, running_var_;
  Tensor grad_gamma_, grad_beta_;
  // forward cache
  Tensor xhat_;
  std::vector<double> istd_;  // per channel
  bool train_pass_ = false;
};

class ReLU : public Layer {
 public:
  const char* kind() const override { return "relu"; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  Tensor input_;
};

// Inverted dropout: train mode zeroes each element with probability `rate`
// and scales survivors by 1/(1-rate); eval mode is the identity. Mask draws
// come from the supplied Rng in flat element order.
class Dropout : public Layer {
 public:
  Dropout(double rate, Rng& rng);

  const char* kind() const override { return "dropout"; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  double rate() const { return rate_; }

 private:
  double rate_;
  Rng* rng_;
  Tensor mask_;
  bool masked_ = false;
};

// Affine map [batch, n_in] -> [batch, n_out]; y = x W^T + b.
class Linear : public Layer {
 public:
  Linear(std::int64_t n_in, std::int64_t n_out, Rng& rng);

  const char* kind() const override { return "linear"; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<Tensor*> parameters() override { return {&weight_, &bias_}; }
  std::vector<Tensor*> gradients() override;
  std::vector<std::string> parameter_names() const override { return {"weight", "bias"}; }

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  std::int64_t n_in_, n_out_;
  Tensor weight_;  // [n_out, n_in]
  Tensor bias_;    // [n_out]
  Tensor grad_weight_, grad_bias_;
  Tensor input_;
};

// [batch, ...] -> [batch, prod(...)]; values preserved in row-major order.
class Flatten : public Layer {
 public:
  const char* kind() const override { return "flatten"; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  std::vector<std::int64_t> in_shape_;
};

// A straight pipeline of layers owning one Rng that seeds parameter
// initialization and drives dropout masks. Single-threaded per instance.
class Net {
 public:
  explicit Net(std::uint64_t seed) : rng_(std::make_unique<Rng>(seed)) {}

  Rng& rng() { return *rng_; }
  // Resets the Rng stream (dropout masks become reproducible from here on).
  void reseed(std::uint64_t seed) { rng_->reseed(seed); }

  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Tensor forward(const Tensor& x);
  // grad of the loss w.r.t. the net output -> grad w.r.t. the net input.
  Tensor backward(const Tensor& grad_out);
  void set_mode(Mode m);
  void zero_grad();

  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }
  const Layer& layer(std::size_t i) const { return *layers_[i]; }

  std::vector<Tensor*> parameters();
  std::vector<Tensor*> gradients();
  // Parameters then buffers, with "<index>.<kind>.<name>" labels; this is the
  // serialization manifest order.
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
  std::int64_t parameter_count();

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  std::unique_ptr<Rng> rng_;
};

}  // namespace wmp::nn
