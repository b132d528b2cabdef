#pragma once

#include <cstdint>
#include <vector>

#include "wmpredict/dataset.hpp"
#include "wmpredict/model.hpp"

namespace wmp {

struct Hyperparams {
  int batch_size = 8;
  double lr = 0.1;
  int epochs = 300;
  double dropout = 0.5;  // applied to conv and fc dropout layers
  int k_folds = 5;
  std::uint64_t seed = 0;
  // Optional step decay: lr * lr_gamma^(epoch / lr_step). Off when lr_step=0.
  int lr_step = 0;
  double lr_gamma = 0.1;

  void validate() const;  // throws ConfigError on non-positive fields
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_metric = 0.0;
  double test_metric = 0.0;
};

// The test metric is tracked per epoch; best_test_metric is the optimum over
// epochs (max accuracy / min MAE), mirroring best-epoch reporting. The
// returned model always carries final-epoch parameters, and final_test_metric
// records the unbiased end-of-training value alongside.
struct TrainHistory {
  Task task = Task::Sex;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_test_metric = 0.0;
  double final_test_metric = 0.0;
};

struct TrainResult {
  TrainedModel model;
  TrainHistory history;
};

// Trains one model on the given split: min-max normalization fitted on the
// train indices only, seeded shuffling each epoch, minibatch SGD with the
// last partial batch kept, per-epoch train/test evaluation in eval mode.
// Throws NumericError with epoch/batch coordinates if the loss goes
// non-finite.
TrainResult train_one(const ModelSpec& spec, const Dataset& dataset, const FoldSplit& split,
                      const Hyperparams& hp, std::uint64_t seed);

// Accuracy (fraction of argmax-correct) for sex, MAE in years for age,
// over dataset[idx] with features normalized by `norm`.
double evaluate_net(nn::Net& net, const NormParams& norm, const Dataset& dataset,
                    const std::vector<std::size_t>& idx, Task task);
double evaluate(const TrainedModel& model, const Dataset& dataset,
                const std::vector<std::size_t>& idx);

struct FoldMetric {
  int fold = 0;
  double best_metric = 0.0;
  int best_epoch = 0;
  double final_metric = 0.0;
};

struct CVReport {
  Task task = Task::Sex;
  std::vector<FoldMetric> folds;  // metric = per-fold best test metric
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation over folds
};

void finalize_cv_stats(CVReport& report);

// Trains one model per fold of the plan (per-fold seed derived from hp.seed),
// optionally in parallel. Each subject is tested exactly once across folds.
// When out_results is given it receives the per-fold models in fold order.
CVReport cross_validate(const ModelSpec& spec, const Dataset& dataset, const Hyperparams& hp,
                        const FoldPlan& plan, int workers = 1,
                        std::vector<TrainResult>* out_results = nullptr);

}  // namespace wmp
