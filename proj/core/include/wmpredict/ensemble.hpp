#pragma once

#include <vector>

#include "wmpredict/training.hpp"

namespace wmp {

enum class CombineRule { Vote, Average };

CombineRule rule_for(Task task);  // Vote for sex, Average for age

// Majority vote over member argmax classes. Ties break on summed softmax
// probability, then on class order (F before M). The combined probs are the
// member mean, so a singleton ensemble reproduces its member exactly.
Prediction combine_vote(const std::vector<Prediction>& members);

// Arithmetic mean of member regression outputs.
Prediction combine_average(const std::vector<Prediction>& members);

// Per-measure models trained independently on the same fold split, combined
// by vote (sex) or average (age).
struct Ensemble {
  Task task = Task::Sex;
  CombineRule rule = CombineRule::Vote;
  std::vector<TrainedModel> members;

  // raw_per_member[i] holds the raw features for members[i]'s measure.
  Prediction predict(const std::vector<std::vector<double>>& raw_per_member) const;
};

// Trains one model per measure on a single split; datasets must be aligned
// with `measures` and share the subject order.
Ensemble ensemble_train(const std::vector<MeasureId>& measures, const ModelSpec& tmpl,
                        const std::vector<Dataset>& datasets, const FoldSplit& split,
                        const Hyperparams& hp, std::uint64_t seed);

struct EnsembleMemberReport {
  MeasureId measure;
  std::vector<FoldMetric> folds;
  double mean = 0.0;
  double sd = 0.0;
};

struct EnsembleReport {
  Task task = Task::Sex;
  std::vector<EnsembleMemberReport> members;
  // Combined metric per fold, computed from final-epoch member models over
  // the fold's test subjects, plus mean +/- sample sd.
  std::vector<double> fold_combined;
  double combined_mean = 0.0;
  double combined_sd = 0.0;
};

// Full cross-validated ensemble: every member shares the fold plan, so each
// test subject gets one combined prediction per fold. Jobs (measure x fold)
// run in parallel up to `workers`.
EnsembleReport ensemble_cv(const std::vector<MeasureId>& measures, const ModelSpec& tmpl,
                           const std::vector<Dataset>& datasets, const Hyperparams& hp,
                           const FoldPlan& plan, int workers = 1,
                           std::vector<Ensemble>* out_fold_ensembles = nullptr);

}  // namespace wmp
