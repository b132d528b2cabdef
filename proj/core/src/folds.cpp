#include "wmpredict/folds.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "wmpredict/csv.hpp"
#include "wmpredict/error.hpp"
#include "wmpredict/rng.hpp"

namespace wmp {

int FoldPlan::fold_of(const std::string& subject_id) const {
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (subjects[i] == subject_id) return fold[i];
  }
  throw ValidationError("subject '" + subject_id + "' not in fold plan");
}

std::vector<std::string> FoldPlan::test_subjects(int f) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (fold[i] == f) out.push_back(subjects[i]);
  }
  return out;
}

std::vector<std::string> FoldPlan::train_subjects(int f) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (fold[i] != f) out.push_back(subjects[i]);
  }
  return out;
}

void FoldPlan::save_csv(std::ostream& out) const {
  out << "subject_id,fold\n";
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    out << subjects[i] << ',' << fold[i] << '\n';
  }
}

FoldPlan FoldPlan::load_csv(std::istream& in) {
  CsvTable csv = read_csv(in, "fold plan");
  const std::vector<std::string> expected = {"subject_id", "fold"};
  if (csv.header != expected) {
    throw ValidationError("fold plan: expected header subject_id,fold");
  }
  FoldPlan plan;
  for (const auto& row : csv.rows) {
    auto f = parse_double(row[1]);
    if (!f || *f != static_cast<int>(*f) || *f < 0) {
      throw ValidationError("fold plan: bad fold '" + row[1] + "'");
    }
    plan.subjects.push_back(row[0]);
    plan.fold.push_back(static_cast<int>(*f));
    plan.k = std::max(plan.k, static_cast<int>(*f) + 1);
  }
  return plan;
}

namespace {

void check_fold_args(std::size_t n, int k) {
  if (k < 2) throw ConfigError("k must be >= 2, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > n) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds subject count " +
                      std::to_string(n));
  }
}

// Shuffle positions, then deal position i into fold i % k.
void assign_group(const std::vector<std::size_t>& group, int k, Rng& rng,
                  std::vector<int>& fold) {
  std::vector<std::size_t> order = group;
  rng.shuffle(order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
}

}  // namespace

FoldPlan make_folds(const std::vector<std::string>& subject_ids, int k, std::uint64_t seed) {
  check_fold_args(subject_ids.size(), k);
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& id : subject_ids) {
      if (++seen[id] > 1) throw ValidationError("duplicate subject_id '" + id + "'");
    }
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.subjects = subject_ids;
  plan.fold.assign(subject_ids.size(), 0);
  Rng rng(seed);
  std::vector<std::size_t> everyone(subject_ids.size());
  for (std::size_t i = 0; i < everyone.size(); ++i) everyone[i] = i;
  assign_group(everyone, k, rng, plan.fold);
  return plan;
}

FoldPlan make_stratified_folds(const std::vector<std::string>& subject_ids,
                               const LabelTable& labels, int k, std::uint64_t seed) {
  check_fold_args(subject_ids.size(), k);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.subjects = subject_ids;
  plan.fold.assign(subject_ids.size(), 0);
  Rng rng(seed);
  std::vector<std::size_t> females, males;
  for (std::size_t i = 0; i < subject_ids.size(); ++i) {
    (labels.row(subject_ids[i]).sex == 0 ? females : males).push_back(i);
  }
  assign_group(females, k, rng, plan.fold);
  assign_group(males, k, rng, plan.fold);
  return plan;
}

}  // namespace wmp
