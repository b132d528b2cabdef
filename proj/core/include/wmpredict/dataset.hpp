#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmpredict/folds.hpp"
#include "wmpredict/model.hpp"
#include "wmpredict/table.hpp"

namespace wmp {

// One measure's features for every subject, arranged for one model variant
// and paired with both label targets. Features stay raw (unnormalized);
// normalization is fitted per training fold.
struct Dataset {
  Variant variant = Variant::CNN1D;
  MeasureId measure;
  std::vector<std::int64_t> feature_shape;  // {len} or {rows, cols}
  std::vector<std::string> subjects;
  std::vector<std::vector<double>> features;  // flat, parallel to subjects
  std::vector<int> sex;                       // 0 = F, 1 = M
  std::vector<double> age;                    // years

  std::size_t size() const { return subjects.size(); }
  std::int64_t flat_len() const;
};

// Arranges a fully imputed table into a Dataset. Every subject in the table
// must have a label row.
Dataset build_dataset(const ClusterMeasureTable& table, const LabelTable& labels, Variant variant);

// Index split of a dataset for one fold of a plan. Every dataset subject must
// be present in the plan.
struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

FoldSplit split_for_fold(const FoldPlan& plan, const Dataset& dataset, int fold);

}  // namespace wmp
