#include "wmpredict/nn/layers.hpp"

#include <cmath>

#include "wmpredict/error.hpp"

namespace wmp::nn {

namespace {

void ensure_grad(Tensor& grad, const Tensor& param) {
  if (!grad.same_shape(param)) grad = Tensor(param.shape());
}

void init_uniform(Tensor& t, double bound, Rng& rng) {
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(-bound, bound);
}

}  // namespace

void Layer::zero_grad() {
  for (Tensor* g : gradients()) g->fill(0.0);
}

// ---------------------------------------------------------------------------
// Conv1d

Conv1d::Conv1d(std::int64_t ch_in, std::int64_t ch_out, std::int64_t kernel, Rng& rng)
    : ch_in_(ch_in), ch_out_(ch_out), kernel_(kernel),
      weight_({ch_out, ch_in, kernel}), bias_({ch_out}) {
  if (ch_in < 1 || ch_out < 1 || kernel < 1) throw Error("conv1d: bad dimensions");
  const double bound = std::sqrt(1.0 / static_cast<double>(ch_in * kernel));
  init_uniform(weight_, bound, rng);
  init_uniform(bias_, bound, rng);
}

std::vector<Tensor*> Conv1d::gradients() {
  ensure_grad(grad_weight_, weight_);
  ensure_grad(grad_bias_, bias_);
  return {&grad_weight_, &grad_bias_};
}

Tensor Conv1d::forward(const Tensor& x) {
  if (x.rank() != 3 || x.dim(1) != ch_in_) {
    throw Error("conv1d: expected input [batch, " + std::to_string(ch_in_) + ", len], got " +
                x.shape_str());
  }
  const std::int64_t batch = x.dim(0), len = x.dim(2);
  if (len < kernel_) {
    throw Error("conv1d: input length " + std::to_string(len) + " shorter than kernel " +
                std::to_string(kernel_));
  }
  input_ = x;
  const std::int64_t out_len = len - kernel_ + 1;
  Tensor y({batch, ch_out_, out_len});
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t co = 0; co < ch_out_; ++co) {
      double* out = y.data() + (b * ch_out_ + co) * out_len;
      const double bv = bias_[co];
      for (std::int64_t i = 0; i < out_len; ++i) out[i] = bv;
      for (std::int64_t ci = 0; ci < ch_in_; ++ci) {
        const double* in = x.data() + (b * ch_in_ + ci) * len;
        const double* w = weight_.data() + (co * ch_in_ + ci) * kernel_;
        for (std::int64_t k = 0; k < kernel_; ++k) {
          const double wk = w[k];
          for (std::int64_t i = 0; i < out_len; ++i) out[i] += wk * in[i + k];
        }
      }
    }
  }
  return y;
}

Tensor Conv1d::backward(const Tensor& g) {
  const std::int64_t batch = input_.dim(0), len = input_.dim(2);
  const std::int64_t out_len = len - kernel_ + 1;
  if (g.rank() != 3 || g.dim(0) != batch || g.dim(1) != ch_out_ || g.dim(2) != out_len) {
    throw Error("conv1d backward: gradient shape " + g.shape_str() + " does not match forward");
  }
  gradients();  // allocate
  Tensor gx(input_.shape());
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t co = 0; co < ch_out_; ++co) {
      const double* gout = g.data() + (b * ch_out_ + co) * out_len;
      double gb = 0.0;
      for (std::int64_t i = 0; i < out_len; ++i) gb += gout[i];
      grad_bias_[co] += gb;
      for (std::int64_t ci = 0; ci < ch_in_; ++ci) {
        const double* in = input_.data() + (b * ch_in_ + ci) * len;
        double* gin = gx.data() + (b * ch_in_ + ci) * len;
        const double* w = weight_.data() + (co * ch_in_ + ci) * kernel_;
        double* gw = grad_weight_.data() + (co * ch_in_ + ci) * kernel_;
        for (std::int64_t k = 0; k < kernel_; ++k) {
          const double wk = w[k];
          double acc = 0.0;
          for (std::int64_t i = 0; i < out_len; ++i) {
            acc += gout[i] * in[i + k];
            gin[i + k] += gout[i] * wk;
          }
          gw[k] += acc;
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(std::int64_t ch_in, std::int64_t ch_out, std::int64_t kernel,
               std::int64_t padding, Rng& rng)
    : ch_in_(ch_in), ch_out_(ch_out), kernel_(kernel), padding_(padding),
      weight_({ch_out, ch_in, kernel, kernel}), bias_({ch_out}) {
  if (ch_in < 1 || ch_out < 1 || kernel < 1 || padding < 0) throw Error("conv2d: bad dimensions");
  const double bound = std::sqrt(1.0 / static_cast<double>(ch_in * kernel * kernel));
  init_uniform(weight_, bound, rng);
  init_uniform(bias_, bound, rng);
}

std::vector<Tensor*> Conv2d::gradients() {
  ensure_grad(grad_weight_, weight_);
  ensure_grad(grad_bias_, bias_);
  return {&grad_weight_, &grad_bias_};
}

Tensor Conv2d::forward(const Tensor& x) {
  if (x.rank() != 4 || x.dim(1) != ch_in_) {
    throw Error("conv2d: expected input [batch, " + std::to_string(ch_in_) + ", h, w], got " +
                x.shape_str());
  }
  const std::int64_t batch = x.dim(0), h = x.dim(2), w = x.dim(3);
  if (h < 1 || w < 1) throw Error("conv2d: empty spatial dimensions");
  const std::int64_t oh = h + 2 * padding_ - kernel_ + 1;
  const std::int64_t ow = w + 2 * padding_ - kernel_ + 1;
  if (oh < 1 || ow < 1) throw Error("conv2d: kernel larger than padded input");
  input_ = x;
  Tensor y({batch, ch_out_, oh, ow});
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t co = 0; co < ch_out_; ++co) {
      double* out = y.data() + (b * ch_out_ + co) * oh * ow;
      const double bv = bias_[co];
      for (std::int64_t i = 0; i < oh * ow; ++i) out[i] = bv;
      for (std::int64_t ci = 0; ci < ch_in_; ++ci) {
        const double* in = x.data() + (b * ch_in_ + ci) * h * w;
        const double* wgt = weight_.data() + (co * ch_in_ + ci) * kernel_ * kernel_;
        for (std::int64_t ky = 0; ky < kernel_; ++ky) {
          for (std::int64_t kx = 0; kx < kernel_; ++kx) {
            const double wk = wgt[ky * kernel_ + kx];
            for (std::int64_t oy = 0; oy < oh; ++oy) {
              const std::int64_t iy = oy + ky - padding_;
              if (iy < 0 || iy >= h) continue;
              const double* in_row = in + iy * w;
              double* out_row = out + oy * ow;
              for (std::int64_t ox = 0; ox < ow; ++ox) {
                const std::int64_t ix = ox + kx - padding_;
                if (ix < 0 || ix >= w) continue;
                out_row[ox] += wk * in_row[ix];
              }
            }
          }
        }
      }
    }
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& g) {
  const std::int64_t batch = input_.dim(0), h = input_.dim(2), w = input_.dim(3);
  const std::int64_t oh = h + 2 * padding_ - kernel_ + 1;
  const std::int64_t ow = w + 2 * padding_ - kernel_ + 1;
  if (g.rank() != 4 || g.dim(0) != batch || g.dim(1) != ch_out_ || g.dim(2) != oh ||
      g.dim(3) != ow) {
    throw Error("conv2d backward: gradient shape " + g.shape_str() + " does not match forward");
  }
  gradients();
  Tensor gx(input_.shape());
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t co = 0; co < ch_out_; ++co) {
      const double* gout = g.data() + (b * ch_out_ + co) * oh * ow;
      double gb = 0.0;
      for (std::int64_t i = 0; i < oh * ow; ++i) gb += gout[i];
      grad_bias_[co] += gb;
      for (std::int64_t ci = 0; ci < ch_in_; ++ci) {
        const double* in = input_.data() + (b * ch_in_ + ci) * h * w;
        double* gin = gx.data() + (b * ch_in_ + ci) * h * w;
        const double* wgt = weight_.data() + (co * ch_in_ + ci) * kernel_ * kernel_;
        double* gw = grad_weight_.data() + (co * ch_in_ + ci) * kernel_ * kernel_;
        for (std::int64_t ky = 0; ky < kernel_; ++ky) {
          for (std::int64_t kx = 0; kx < kernel_; ++kx) {
            const double wk = wgt[ky * kernel_ + kx];
            double acc = 0.0;
            for (std::int64_t oy = 0; oy < oh; ++oy) {
              const std::int64_t iy = oy + ky - padding_;
              if (iy < 0 || iy >= h) continue;
              const double* in_row = in + iy * w;
              double* gin_row = gin + iy * w;
              const double* gout_row = gout + oy * ow;
              for (std::int64_t ox = 0; ox < ow; ++ox) {
                const std::int64_t ix = ox + kx - padding_;
                if (ix < 0 || ix >= w) continue;
                acc += gout_row[ox] * in_row[ix];
                gin_row[ix] += gout_row[ox] * wk;
              }
            }
            gw[ky * kernel_ + kx] += acc;
          }
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// BatchNorm

BatchNorm::BatchNorm(std::int64_t channels, double epsilon, double momentum)
    : channels_(channels), epsilon_(epsilon), momentum_(momentum),
      gamma_({channels}, 1.0), beta_({channels}, 0.0),
      running_mean_({channels}, 0.0), running_var_({channels}, 1.0) {
  if (channels < 1) throw Error("batchnorm: channels must be >= 1");
}

std::vector<Tensor*> BatchNorm::gradients() {
  ensure_grad(grad_gamma_, gamma_);
  ensure_grad(grad_beta_, beta_);
  return {&grad_gamma_, &grad_beta_};
}

Tensor BatchNorm::forward(const Tensor& x) {
  if (x.rank() < 2 || x.dim(1) != channels_) {
    throw Error("batchnorm: expected input [batch, " + std::to_string(channels_) +
                ", ...], got " + x.shape_str());
  }
  const std::int64_t batch = x.dim(0);
  if (batch == 0) throw Error("batchnorm: empty batch");
  std::int64_t spatial = 1;
  for (std::int64_t d = 2; d < x.rank(); ++d) spatial *= x.dim(d);
  const std::int64_t n = batch * spatial;

  Tensor y(x.shape());
  istd_.assign(static_cast<std::size_t>(channels_), 0.0);
  train_pass_ = mode() == Mode::Train;

  if (train_pass_) {
    xhat_ = Tensor(x.shape());
    for (std::int64_t c = 0; c < channels_; ++c) {
      double mean = 0.0;
      for (std::int64_t b = 0; b < batch; ++b) {
        const double* in = x.data() + (b * channels_ + c) * spatial;
        for (std::int64_t i = 0; i < spatial; ++i) mean += in[i];
      }
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::int64_t b = 0; b < batch; ++b) {
        const double* in = x.data() + (b * channels_ + c) * spatial;
        for (std::int64_t i = 0; i < spatial; ++i) {
          const double d = in[i] - mean;
          var += d * d;
        }
      }
      var /= static_cast<double>(n);
      const double istd = 1.0 / std::sqrt(var + epsilon_);
      istd_[static_cast<std::size_t>(c)] = istd;
      const double g = gamma_[c], bt = beta_[c];
      for (std::int64_t b = 0; b < batch; ++b) {
        const double* in = x.data() + (b * channels_ + c) * spatial;
        double* xh = xhat_.data() + (b * channels_ + c) * spatial;
        double* out = y.data() + (b * channels_ + c) * spatial;
        for (std::int64_t i = 0; i < spatial; ++i) {
          xh[i] = (in[i] - mean) * istd;
          out[i] = g * xh[i] + bt;
        }
      }
      const double var_running =
          n > 1 ? var * static_cast<double>(n) / static_cast<double>(n - 1) : var;
      running_mean_[c] = (1.0 - momentum_) * running_mean_[c] + momentum_ * mean;
      running_var_[c] = (1.0 - momentum_) * running_var_[c] + momentum_ * var_running;
    }
  } else {
    xhat_ = Tensor(x.shape());
    for (std::int64_t c = 0; c < channels_; ++c) {
      const double mean = running_mean_[c];
      const double istd = 1.0 / std::sqrt(running_var_[c] + epsilon_);
      istd_[static_cast<std::size_t>(c)] = istd;
      const double g = gamma_[c], bt = beta_[c];
      for (std::int64_t b = 0; b < batch; ++b) {
        const double* in = x.data() + (b * channels_ + c) * spatial;
        double* xh = xhat_.data() + (b * channels_ + c) * spatial;
        double* out = y.data() + (b * channels_ + c) * spatial;
        for (std::int64_t i = 0; i < spatial; ++i) {
          xh[i] = (in[i] - mean) * istd;
          out[i] = g * xh[i] + bt;
        }
      }
    }
  }
  return y;
}

Tensor BatchNorm::backward(const Tensor& g) {
  if (!g.same_shape(xhat_)) {
    throw Error("batchnorm backward: gradient shape " + g.shape_str() +
                " does not match forward");
  }
  gradients();
  const std::int64_t batch = xhat_.dim(0);
  std::int64_t spatial = 1;
  for (std::int64_t d = 2; d < xhat_.rank(); ++d) spatial *= xhat_.dim(d);
  const double n = static_cast<double>(batch * spatial);

  Tensor gx(xhat_.shape());
  for (std::int64_t c = 0; c < channels_; ++c) {
    const double istd = istd_[static_cast<std::size_t>(c)];
    const double gm = gamma_[c];
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::int64_t b = 0; b < batch; ++b) {
      const double* gr = g.data() + (b * channels_ + c) * spatial;
      const double* xh = xhat_.data() + (b * channels_ + c) * spatial;
      for (std::int64_t i = 0; i < spatial; ++i) {
        sum_g += gr[i];
        sum_gx += gr[i] * xh[i];
      }
    }
    grad_beta_[c] += sum_g;
    grad_gamma_[c] += sum_gx;
    if (train_pass_) {
      // dL/dx = istd/N * gamma * (N*g - sum(g) - xhat * sum(g*xhat))
      for (std::int64_t b = 0; b < batch; ++b) {
        const double* gr = g.data() + (b * channels_ + c) * spatial;
        const double* xh = xhat_.data() + (b * channels_ + c) * spatial;
        double* out = gx.data() + (b * channels_ + c) * spatial;
        for (std::int64_t i = 0; i < spatial; ++i) {
          out[i] = gm * istd / n * (n * gr[i] - sum_g - xh[i] * sum_gx);
        }
      }
    } else {
      // Running stats are constants in eval mode.
      for (std::int64_t b = 0; b < batch; ++b) {
        const double* gr = g.data() + (b * channels_ + c) * spatial;
        double* out = gx.data() + (b * channels_ + c) * spatial;
        for (std::int64_t i = 0; i < spatial; ++i) out[i] = gm * istd * gr[i];
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// ReLU

Tensor ReLU::forward(const Tensor& x) {
  input_ = x;
  Tensor y(x.shape());
  for (std::int64_t i = 0; i < x.numel(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

Tensor ReLU::backward(const Tensor& g) {
  if (!g.same_shape(input_)) {
    throw Error("relu backward: gradient shape " + g.shape_str() + " does not match forward");
  }
  Tensor gx(g.shape());
  // Subgradient at 0 is taken as 0.
  for (std::int64_t i = 0; i < g.numel(); ++i) gx[i] = input_[i] > 0.0 ? g[i] : 0.0;
  return gx;
}

// ---------------------------------------------------------------------------
// Dropout

Dropout::Dropout(double rate, Rng& rng) : rate_(rate), rng_(&rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw Error("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
}

Tensor Dropout::forward(const Tensor& x) {
  if (mode() == Mode::Eval || rate_ == 0.0) {
    masked_ = false;
    return x;
  }
  masked_ = true;
  mask_ = Tensor(x.shape());
  const double keep_scale = 1.0 / (1.0 - rate_);
  Tensor y(x.shape());
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    const double m = rng_->uniform() >= rate_ ? keep_scale : 0.0;
    mask_[i] = m;
    y[i] = x[i] * m;
  }
  return y;
}

Tensor Dropout::backward(const Tensor& g) {
  if (!masked_) return g;
  if (!g.same_shape(mask_)) {
    throw Error("dropout backward: gradient shape " + g.shape_str() + " does not match forward");
  }
  Tensor gx(g.shape());
  for (std::int64_t i = 0; i < g.numel(); ++i) gx[i] = g[i] * mask_[i];
  return gx;
}

// ---------------------------------------------------------------------------
// Linear

Linear::Linear(std::int64_t n_in, std::int64_t n_out, Rng& rng)
    : n_in_(n_in), n_out_(n_out), weight_({n_out, n_in}), bias_({n_out}) {
  if (n_in < 1 || n_out < 1) throw Error("linear: bad dimensions");
  const double bound = std::sqrt(1.0 / static_cast<double>(n_in));
  init_uniform(weight_, bound, rng);
  init_uniform(bias_, bound, rng);
}

std::vector<Tensor*> Linear::gradients() {
  ensure_grad(grad_weight_, weight_);
  ensure_grad(grad_bias_, bias_);
  return {&grad_weight_, &grad_bias_};
}

Tensor Linear::forward(const Tensor& x) {
  if (x.rank() != 2 || x.dim(1) != n_in_) {
    throw Error("linear: expected input [batch, " + std::to_string(n_in_) + "], got " +
                x.shape_str());
  }
  input_ = x;
  const std::int64_t batch = x.dim(0);
  Tensor y({batch, n_out_});
  for (std::int64_t b = 0; b < batch; ++b) {
    const double* in = x.data() + b * n_in_;
    double* out = y.data() + b * n_out_;
    for (std::int64_t o = 0; o < n_out_; ++o) {
      const double* w = weight_.data() + o * n_in_;
      double acc = bias_[o];
      for (std::int64_t i = 0; i < n_in_; ++i) acc += w[i] * in[i];
      out[o] = acc;
    }
  }
  return y;
}

Tensor Linear::backward(const Tensor& g) {
  const std::int64_t batch = input_.dim(0);
  if (g.rank() != 2 || g.dim(0) != batch || g.dim(1) != n_out_) {
    throw Error("linear backward: gradient shape " + g.shape_str() + " does not match forward");
  }
  gradients();
  Tensor gx({batch, n_in_});
  for (std::int64_t b = 0; b < batch; ++b) {
    const double* in = input_.data() + b * n_in_;
    const double* gout = g.data() + b * n_out_;
    double* gin = gx.data() + b * n_in_;
    for (std::int64_t o = 0; o < n_out_; ++o) {
      const double go = gout[o];
      grad_bias_[o] += go;
      const double* w = weight_.data() + o * n_in_;
      double* gw = grad_weight_.data() + o * n_in_;
      for (std::int64_t i = 0; i < n_in_; ++i) {
        gw[i] += go * in[i];
        gin[i] += go * w[i];
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// Flatten

Tensor Flatten::forward(const Tensor& x) {
  if (x.rank() < 1) throw Error("flatten: scalar input");
  in_shape_ = x.shape();
  std::int64_t rest = 1;
  for (std::int64_t d = 1; d < x.rank(); ++d) rest *= x.dim(d);
  return x.reshaped({x.dim(0), rest});
}

Tensor Flatten::backward(const Tensor& g) { return g.reshaped(in_shape_); }

// ---------------------------------------------------------------------------
// Net

Tensor Net::forward(const Tensor& x) {
  Tensor cur = x;
  for (auto& layer : layers_) cur = layer->forward(cur);
  return cur;
}

Tensor Net::backward(const Tensor& grad_out) {
  Tensor cur = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) cur = (*it)->backward(cur);
  return cur;
}

void Net::set_mode(Mode m) {
  for (auto& layer : layers_) layer->set_mode(m);
}

void Net::zero_grad() {
  for (auto& layer : layers_) layer->zero_grad();
}

std::vector<Tensor*> Net::parameters() {
  std::vector<Tensor*> out;
  for (auto& layer : layers_) {
    auto p = layer->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<Tensor*> Net::gradients() {
  std::vector<Tensor*> out;
  for (auto& layer : layers_) {
    auto g = layer->gradients();
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

std::vector<std::pair<std::string, Tensor*>> Net::named_tensors() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    Layer& layer = *layers_[li];
    const std::string prefix = std::to_string(li) + "." + layer.kind() + ".";
    auto params = layer.parameters();
    auto pnames = layer.parameter_names();
    for (std::size_t i = 0; i < params.size(); ++i) out.emplace_back(prefix + pnames[i], params[i]);
    auto bufs = layer.buffers();
    auto bnames = layer.buffer_names();
    for (std::size_t i = 0; i < bufs.size(); ++i) out.emplace_back(prefix + bnames[i], bufs[i]);
  }
  return out;
}

std::int64_t Net::parameter_count() {
  std::int64_t n = 0;
  for (Tensor* p : parameters()) n += p->numel();
  return n;
}

}  // namespace wmp::nn
