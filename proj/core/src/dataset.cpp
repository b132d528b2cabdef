#include "wmpredict/dataset.hpp"

#include <unordered_map>

#include "wmpredict/error.hpp"

namespace wmp {

std::int64_t Dataset::flat_len() const {
  std::int64_t n = 1;
  for (std::int64_t d : feature_shape) n *= d;
  return n;
}

Dataset build_dataset(const ClusterMeasureTable& table, const LabelTable& labels,
                      Variant variant) {
  Dataset ds;
  ds.variant = variant;
  ds.measure = table.measure();
  if (variant == Variant::CNN1D) {
    ds.feature_shape = {static_cast<std::int64_t>(table.layout().size())};
  } else {
    ds.feature_shape = {3, table.layout().width()};
  }
  ds.subjects = table.subjects();
  ds.features.reserve(ds.subjects.size());
  ds.sex.reserve(ds.subjects.size());
  ds.age.reserve(ds.subjects.size());
  for (const std::string& id : ds.subjects) {
    if (variant == Variant::CNN1D) {
      ds.features.push_back(arrange_1d(table, id).values);
    } else {
      ds.features.push_back(arrange_2d(table, id).values);
    }
    const LabelRow& row = labels.row(id);  // throws if unlabeled
    ds.sex.push_back(row.sex);
    ds.age.push_back(row.age);
  }
  return ds;
}

FoldSplit split_for_fold(const FoldPlan& plan, const Dataset& dataset, int fold) {
  if (fold < 0 || fold >= plan.k) {
    throw ConfigError("fold " + std::to_string(fold) + " out of range [0, " +
                      std::to_string(plan.k) + ")");
  }
  std::unordered_map<std::string, int> fold_of;
  for (std::size_t i = 0; i < plan.subjects.size(); ++i) fold_of[plan.subjects[i]] = plan.fold[i];
  FoldSplit split;
  for (std::size_t i = 0; i < dataset.subjects.size(); ++i) {
    auto it = fold_of.find(dataset.subjects[i]);
    if (it == fold_of.end()) {
      throw ValidationError("subject '" + dataset.subjects[i] + "' missing from fold plan");
    }
    (it->second == fold ? split.test : split.train).push_back(i);
  }
  return split;
}

}  // namespace wmp
