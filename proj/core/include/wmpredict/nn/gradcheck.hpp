#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wmpredict/nn/layers.hpp"
#include "wmpredict/nn/loss.hpp"

namespace wmp::nn {

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  // 0 = every element; otherwise an evenly strided subsample per tensor.
  std::size_t max_per_tensor = 0;
  // The net Rng is reset to this before every forward so dropout masks are
  // identical across the numeric probes.
  std::uint64_t forward_seed = 0x5eedULL;
  bool check_input = true;
};

struct GradCheckEntry {
  std::string tensor;
  double max_rel_err = 0.0;
  std::size_t checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// |a - n| scaled by max(1, |a|, |n|): relative for large gradients, absolute
// near zero so central-difference noise on dead units cannot fail the check.
double gradcheck_rel_err(double analytic, double numeric);

// Central-difference check of every parameter tensor (and optionally the
// input) against the analytic backward pass, under loss_fn applied to the net
// output. Throws NumericError naming the tensor if anything non-finite shows
// up.
GradCheckReport grad_check(Net& net, const Tensor& input,
                           const std::function<LossResult(const Tensor&)>& loss_fn,
                           const GradCheckOptions& opts = {});

}  // namespace wmp::nn
