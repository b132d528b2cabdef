#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wmpredict/table.hpp"

namespace wmp {

// Cross-validation fold assignment: every subject lands in exactly one fold,
// fold sizes differ by at most one. Deterministic in (ids, k, seed).
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> subjects;  // original id order
  std::vector<int> fold;              // parallel to subjects

  int fold_of(const std::string& subject_id) const;  // throws if absent
  std::vector<std::string> test_subjects(int f) const;
  std::vector<std::string> train_subjects(int f) const;

  void save_csv(std::ostream& out) const;  // header subject_id,fold
  static FoldPlan load_csv(std::istream& in);
};

FoldPlan make_folds(const std::vector<std::string>& subject_ids, int k, std::uint64_t seed);

// Same balanced assignment applied per sex group, so each fold sees the group
// proportions of the whole cohort.
FoldPlan make_stratified_folds(const std::vector<std::string>& subject_ids,
                               const LabelTable& labels, int k, std::uint64_t seed);

}  // namespace wmp
