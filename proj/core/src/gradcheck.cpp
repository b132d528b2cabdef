#include "wmpredict/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "wmpredict/error.hpp"

namespace wmp::nn {

double gradcheck_rel_err(double analytic, double numeric) {
  const double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
  return std::fabs(analytic - numeric) / denom;
}

GradCheckReport grad_check(Net& net, const Tensor& input,
                           const std::function<LossResult(const Tensor&)>& loss_fn,
                           const GradCheckOptions& opts) {
  // Analytic pass.
  net.zero_grad();
  net.reseed(opts.forward_seed);
  Tensor out = net.forward(input);
  LossResult loss = loss_fn(out);
  if (!std::isfinite(loss.value)) throw NumericError("grad_check: non-finite loss");
  Tensor input_copy = input;  // probed in place like the parameters
  Tensor grad_input = net.backward(loss.grad);

  auto loss_at = [&]() {
    net.reseed(opts.forward_seed);
    LossResult r = loss_fn(net.forward(input_copy));
    if (!std::isfinite(r.value)) throw NumericError("grad_check: non-finite loss");
    return r.value;
  };

  auto named = net.named_tensors();
  std::vector<std::pair<std::string, Tensor*>> targets;
  std::vector<const Tensor*> analytic;
  {
    auto params = net.parameters();
    auto grads = net.gradients();
    std::size_t pi = 0;
    for (auto& [name, tensor] : named) {
      if (pi < params.size() && tensor == params[pi]) {
        targets.emplace_back(name, tensor);
        analytic.push_back(grads[pi]);
        ++pi;
      }
    }
  }
  if (opts.check_input) {
    targets.emplace_back("input", &input_copy);
    analytic.push_back(&grad_input);
  }

  GradCheckReport report;
  report.tolerance = opts.tolerance;

  auto run_probe = [&](Tensor& tensor, std::int64_t idx) {
    const double orig = tensor[idx];
    tensor[idx] = orig + opts.epsilon;
    const double up = loss_at();
    tensor[idx] = orig - opts.epsilon;
    const double down = loss_at();
    tensor[idx] = orig;
    return (up - down) / (2.0 * opts.epsilon);
  };

  for (std::size_t t = 0; t < targets.size(); ++t) {
    auto& [name, tensor] = targets[t];
    const Tensor& grad = *analytic[t];
    if (!grad.all_finite()) {
      throw NumericError("grad_check: non-finite analytic gradient in tensor '" + name + "'");
    }
    const std::int64_t n = tensor->numel();
    std::int64_t stride = 1;
    if (opts.max_per_tensor > 0 && n > static_cast<std::int64_t>(opts.max_per_tensor)) {
      stride = n / static_cast<std::int64_t>(opts.max_per_tensor);
    }
    GradCheckEntry entry;
    entry.tensor = name;
    for (std::int64_t i = 0; i < n; i += stride) {
      const double numeric = run_probe(*tensor, i);
      const double err = gradcheck_rel_err(grad[i], numeric);
      entry.max_rel_err = std::max(entry.max_rel_err, err);
      ++entry.checked;
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_rel_err <= opts.tolerance;
  return report;
}

}  // namespace wmp::nn
