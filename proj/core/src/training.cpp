#include "wmpredict/training.hpp"

#include <cmath>

#include "wmpredict/error.hpp"
#include "wmpredict/jobs.hpp"
#include "wmpredict/nn/loss.hpp"
#include "wmpredict/rng.hpp"

namespace wmp {

void Hyperparams::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (lr < 0) throw ConfigError("lr must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (dropout < 0 || dropout >= 1) throw ConfigError("dropout must be in [0, 1)");
  if (k_folds < 2) throw ConfigError("k_folds must be >= 2");
  if (lr_step < 0) throw ConfigError("lr_step must be >= 0");
  if (lr_gamma <= 0) throw ConfigError("lr_gamma must be > 0");
}

namespace {

nn::Tensor batch_tensor(const ModelSpec& spec, const std::vector<std::vector<double>>& normed,
                        const std::vector<std::size_t>& idx, std::size_t begin,
                        std::size_t end) {
  std::vector<std::int64_t> shape = spec.input_shape();
  shape.insert(shape.begin(), static_cast<std::int64_t>(end - begin));
  nn::Tensor x(shape);
  const std::int64_t flat = spec.flat_input_len();
  for (std::size_t b = begin; b < end; ++b) {
    const std::vector<double>& row = normed[idx[b]];
    double* dst = x.data() + static_cast<std::int64_t>(b - begin) * flat;
    for (std::int64_t j = 0; j < flat; ++j) dst[j] = row[static_cast<std::size_t>(j)];
  }
  return x;
}

double metric_over(nn::Net& net, const ModelSpec& spec, const Dataset& dataset,
                   const std::vector<std::vector<double>>& normed,
                   const std::vector<std::size_t>& idx, Task task) {
  if (idx.empty()) throw ValidationError("evaluate: empty subject set");
  net.set_mode(nn::Mode::Eval);
  const std::size_t eval_batch = 64;
  std::size_t correct = 0;
  double abs_err = 0.0;
  for (std::size_t begin = 0; begin < idx.size(); begin += eval_batch) {
    const std::size_t end = std::min(idx.size(), begin + eval_batch);
    nn::Tensor x = batch_tensor(spec, normed, idx, begin, end);
    nn::Tensor out = net.forward(x);
    for (std::size_t b = begin; b < end; ++b) {
      const std::int64_t row = static_cast<std::int64_t>(b - begin);
      if (task == Task::Sex) {
        const int pred = out.at2(row, 1) > out.at2(row, 0) ? 1 : 0;
        if (pred == dataset.sex[idx[b]]) ++correct;
      } else {
        abs_err += std::fabs(out.at2(row, 0) - dataset.age[idx[b]]);
      }
    }
  }
  const double n = static_cast<double>(idx.size());
  return task == Task::Sex ? static_cast<double>(correct) / n : abs_err / n;
}

bool better(Task task, double candidate, double incumbent) {
  return task == Task::Sex ? candidate > incumbent : candidate < incumbent;
}

}  // namespace

TrainResult train_one(const ModelSpec& spec, const Dataset& dataset, const FoldSplit& split,
                      const Hyperparams& hp, std::uint64_t seed) {
  spec.validate();
  hp.validate();
  if (split.train.empty()) throw ValidationError("train_one: empty train set");
  if (dataset.variant != spec.variant) {
    throw ConfigError("dataset arrangement does not match model variant");
  }

  // Leakage guard: normalization statistics come from the train split only.
  NormParams norm = fit_minmax(dataset.features, split.train);
  std::vector<std::vector<double>> normed(dataset.size());
  for (std::size_t i : split.train) normed[i] = apply_minmax(dataset.features[i], norm);
  for (std::size_t i : split.test) normed[i] = apply_minmax(dataset.features[i], norm);

  nn::Net net = build_model(spec, seed);
  Rng order_rng(mix_seed(seed, 0x0bdeULL));

  TrainHistory history;
  history.task = spec.task;
  const bool has_test = !split.test.empty();
  std::vector<std::size_t> order = split.train;

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    const double lr = hp.lr_step > 0
                          ? hp.lr * std::pow(hp.lr_gamma, (epoch - 1) / hp.lr_step)
                          : hp.lr;
    net.set_mode(nn::Mode::Train);
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(hp.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(hp.batch_size));
      nn::Tensor x = batch_tensor(spec, normed, order, begin, end);
      nn::Tensor out = net.forward(x);
      nn::LossResult loss;
      if (spec.task == Task::Sex) {
        std::vector<int> targets(end - begin);
        for (std::size_t b = begin; b < end; ++b) targets[b - begin] = dataset.sex[order[b]];
        loss = nn::cross_entropy_loss(out, targets);
      } else {
        std::vector<double> targets(end - begin);
        for (std::size_t b = begin; b < end; ++b) targets[b - begin] = dataset.age[order[b]];
        loss = nn::mse_loss(out, targets);
      }
      if (!std::isfinite(loss.value)) {
        throw NumericError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(begin / static_cast<std::size_t>(hp.batch_size)));
      }
      loss_sum += loss.value * static_cast<double>(end - begin);
      net.zero_grad();
      net.backward(loss.grad);
      nn::sgd_step(net.parameters(), net.gradients(), lr);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_metric = metric_over(net, spec, dataset, normed, split.train, spec.task);
    rec.test_metric =
        has_test ? metric_over(net, spec, dataset, normed, split.test, spec.task) : 0.0;
    history.epochs.push_back(rec);
    if (has_test &&
        (history.best_epoch == 0 || better(spec.task, rec.test_metric, history.best_test_metric))) {
      history.best_epoch = epoch;
      history.best_test_metric = rec.test_metric;
    }
  }
  if (has_test) history.final_test_metric = history.epochs.back().test_metric;

  TrainResult result;
  result.history = std::move(history);
  result.model.spec = spec;
  result.model.measure = dataset.measure;
  result.model.training_seed = seed;
  result.model.norm = std::move(norm);
  result.model.net = std::make_shared<nn::Net>(std::move(net));
  result.model.net->set_mode(nn::Mode::Eval);
  return result;
}

double evaluate_net(nn::Net& net, const NormParams& norm, const Dataset& dataset,
                    const std::vector<std::size_t>& idx, Task task) {
  if (idx.empty()) throw ValidationError("evaluate: empty subject set");
  std::vector<std::vector<double>> normed(dataset.size());
  for (std::size_t i : idx) normed[i] = apply_minmax(dataset.features[i], norm);
  ModelSpec probe;
  probe.variant = dataset.variant;
  probe.task = task;
  if (dataset.variant == Variant::CNN1D) {
    probe.input_len = dataset.feature_shape[0];
  } else {
    probe.input_rows = dataset.feature_shape[0];
    probe.input_cols = dataset.feature_shape[1];
  }
  return metric_over(net, probe, dataset, normed, idx, task);
}

double evaluate(const TrainedModel& model, const Dataset& dataset,
                const std::vector<std::size_t>& idx) {
  if (!model.net) throw Error("evaluate: model has no network");
  return evaluate_net(*model.net, model.norm, dataset, idx, model.spec.task);
}

void finalize_cv_stats(CVReport& report) {
  const std::size_t k = report.folds.size();
  if (k == 0) {
    report.mean = report.sd = 0.0;
    return;
  }
  double sum = 0.0;
  for (const FoldMetric& f : report.folds) sum += f.best_metric;
  report.mean = sum / static_cast<double>(k);
  if (k < 2) {
    report.sd = 0.0;
    return;
  }
  double ss = 0.0;
  for (const FoldMetric& f : report.folds) {
    const double d = f.best_metric - report.mean;
    ss += d * d;
  }
  report.sd = std::sqrt(ss / static_cast<double>(k - 1));
}

CVReport cross_validate(const ModelSpec& spec, const Dataset& dataset, const Hyperparams& hp,
                        const FoldPlan& plan, int workers,
                        std::vector<TrainResult>* out_results) {
  CVReport report;
  report.task = spec.task;
  report.folds.resize(static_cast<std::size_t>(plan.k));
  std::vector<TrainResult> results(static_cast<std::size_t>(plan.k));
  run_jobs(static_cast<std::size_t>(plan.k), workers, [&](std::size_t f) {
    FoldSplit split = split_for_fold(plan, dataset, static_cast<int>(f));
    const std::uint64_t fold_seed = mix_seed(hp.seed, 0xf01d0000ULL + f);
    results[f] = train_one(spec, dataset, split, hp, fold_seed);
    FoldMetric& metric = report.folds[f];
    metric.fold = static_cast<int>(f);
    metric.best_metric = results[f].history.best_test_metric;
    metric.best_epoch = results[f].history.best_epoch;
    metric.final_metric = results[f].history.final_test_metric;
  });
  finalize_cv_stats(report);
  if (out_results) *out_results = std::move(results);
  return report;
}

}  // namespace wmp
