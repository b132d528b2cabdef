#include "wmpredict/ensemble.hpp"

#include <cmath>

#include "wmpredict/error.hpp"
#include "wmpredict/jobs.hpp"
#include "wmpredict/rng.hpp"

namespace wmp {

CombineRule rule_for(Task task) { return task == Task::Sex ? CombineRule::Vote : CombineRule::Average; }

Prediction combine_vote(const std::vector<Prediction>& members) {
  if (members.empty()) throw ValidationError("vote over empty member list");
  int votes[2] = {0, 0};
  double prob_sum[2] = {0.0, 0.0};
  for (const Prediction& p : members) {
    ++votes[p.cls()];
    prob_sum[0] += p.probs[0];
    prob_sum[1] += p.probs[1];
  }
  Prediction out;
  out.task = Task::Sex;
  const std::size_t n = members.size();
  out.probs = {prob_sum[0] / static_cast<double>(n), prob_sum[1] / static_cast<double>(n)};
  if (votes[0] != votes[1]) {
    out.label = votes[1] > votes[0] ? 1 : 0;
  } else if (prob_sum[0] != prob_sum[1]) {
    out.label = prob_sum[1] > prob_sum[0] ? 1 : 0;
  } else {
    out.label = 0;  // class order: F before M
  }
  return out;
}

Prediction combine_average(const std::vector<Prediction>& members) {
  if (members.empty()) throw ValidationError("average over empty member list");
  Prediction out;
  out.task = Task::Age;
  double sum = 0.0;
  for (const Prediction& p : members) sum += p.value;
  out.value = sum / static_cast<double>(members.size());
  return out;
}

Prediction Ensemble::predict(const std::vector<std::vector<double>>& raw_per_member) const {
  if (members.empty()) throw ValidationError("ensemble has no members");
  if (raw_per_member.size() != members.size()) {
    throw ValidationError("ensemble predict: got features for " +
                          std::to_string(raw_per_member.size()) + " members, expected " +
                          std::to_string(members.size()));
  }
  std::vector<Prediction> preds;
  preds.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    preds.push_back(members[i].predict(raw_per_member[i]));
  }
  return rule == CombineRule::Vote ? combine_vote(preds) : combine_average(preds);
}

namespace {

void check_ensemble_inputs(const std::vector<MeasureId>& measures,
                           const std::vector<Dataset>& datasets) {
  if (measures.empty()) throw ValidationError("ensemble needs at least one measure");
  if (datasets.size() != measures.size()) {
    throw ConfigError("ensemble: dataset count does not match measure count");
  }
  for (std::size_t i = 0; i < measures.size(); ++i) {
    if (datasets[i].measure != measures[i]) {
      throw ConfigError("ensemble: dataset " + std::to_string(i) + " holds measure " +
                        datasets[i].measure.name() + ", expected " + measures[i].name());
    }
    if (datasets[i].subjects != datasets[0].subjects) {
      throw ConfigError("ensemble: datasets must share one subject order");
    }
  }
}

}  // namespace

Ensemble ensemble_train(const std::vector<MeasureId>& measures, const ModelSpec& tmpl,
                        const std::vector<Dataset>& datasets, const FoldSplit& split,
                        const Hyperparams& hp, std::uint64_t seed) {
  check_ensemble_inputs(measures, datasets);
  Ensemble ens;
  ens.task = tmpl.task;
  ens.rule = rule_for(tmpl.task);
  for (std::size_t m = 0; m < measures.size(); ++m) {
    const std::uint64_t member_seed = mix_seed(seed, 0x3e00ULL + m);
    ens.members.push_back(train_one(tmpl, datasets[m], split, hp, member_seed).model);
  }
  return ens;
}

EnsembleReport ensemble_cv(const std::vector<MeasureId>& measures, const ModelSpec& tmpl,
                           const std::vector<Dataset>& datasets, const Hyperparams& hp,
                           const FoldPlan& plan, int workers,
                           std::vector<Ensemble>* out_fold_ensembles) {
  check_ensemble_inputs(measures, datasets);
  const std::size_t n_measures = measures.size();
  const std::size_t n_folds = static_cast<std::size_t>(plan.k);

  EnsembleReport report;
  report.task = tmpl.task;
  report.members.resize(n_measures);
  for (std::size_t m = 0; m < n_measures; ++m) {
    report.members[m].measure = measures[m];
    report.members[m].folds.resize(n_folds);
  }

  // One job per (measure, fold); member seeds depend on measure and fold
  // only, so results are independent of scheduling.
  std::vector<TrainResult> results(n_measures * n_folds);
  run_jobs(n_measures * n_folds, workers, [&](std::size_t job) {
    const std::size_t m = job / n_folds;
    const std::size_t f = job % n_folds;
    FoldSplit split = split_for_fold(plan, datasets[m], static_cast<int>(f));
    const std::uint64_t seed = mix_seed(hp.seed, 0x3e0000ULL + m * 0x100ULL + f);
    results[job] = train_one(tmpl, datasets[m], split, hp, seed);
    FoldMetric& metric = report.members[m].folds[f];
    metric.fold = static_cast<int>(f);
    metric.best_metric = results[job].history.best_test_metric;
    metric.best_epoch = results[job].history.best_epoch;
    metric.final_metric = results[job].history.final_test_metric;
  });

  for (std::size_t m = 0; m < n_measures; ++m) {
    CVReport tmp;
    tmp.folds = report.members[m].folds;
    finalize_cv_stats(tmp);
    report.members[m].mean = tmp.mean;
    report.members[m].sd = tmp.sd;
  }

  // Combined metric per fold from final-epoch member models.
  report.fold_combined.resize(n_folds, 0.0);
  std::vector<Ensemble> fold_ensembles(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    Ensemble& ens = fold_ensembles[f];
    ens.task = tmpl.task;
    ens.rule = rule_for(tmpl.task);
    for (std::size_t m = 0; m < n_measures; ++m) {
      ens.members.push_back(results[m * n_folds + f].model);
    }
    FoldSplit split = split_for_fold(plan, datasets[0], static_cast<int>(f));
    if (split.test.empty()) throw ValidationError("ensemble fold has no test subjects");
    std::size_t correct = 0;
    double abs_err = 0.0;
    for (std::size_t i : split.test) {
      std::vector<std::vector<double>> raw;
      raw.reserve(n_measures);
      for (std::size_t m = 0; m < n_measures; ++m) raw.push_back(datasets[m].features[i]);
      Prediction pred = ens.predict(raw);
      if (tmpl.task == Task::Sex) {
        if (pred.cls() == datasets[0].sex[i]) ++correct;
      } else {
        abs_err += std::fabs(pred.value - datasets[0].age[i]);
      }
    }
    const double n = static_cast<double>(split.test.size());
    report.fold_combined[f] =
        tmpl.task == Task::Sex ? static_cast<double>(correct) / n : abs_err / n;
  }

  double sum = 0.0;
  for (double v : report.fold_combined) sum += v;
  report.combined_mean = sum / static_cast<double>(n_folds);
  if (n_folds > 1) {
    double ss = 0.0;
    for (double v : report.fold_combined) ss += (v - report.combined_mean) * (v - report.combined_mean);
    report.combined_sd = std::sqrt(ss / static_cast<double>(n_folds - 1));
  }
  if (out_fold_ensembles) *out_fold_ensembles = std::move(fold_ensembles);
  return report;
}

}  // namespace wmp
