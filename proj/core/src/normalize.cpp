#include "wmpredict/normalize.hpp"

#include "wmpredict/error.hpp"

namespace wmp {

NormParams fit_minmax(const std::vector<const std::vector<double>*>& features) {
  if (features.empty()) throw ValidationError("fit_minmax: empty feature list");
  const std::size_t n = features.front()->size();
  NormParams p;
  p.min = *features.front();
  p.max = *features.front();
  for (std::size_t i = 1; i < features.size(); ++i) {
    const std::vector<double>& row = *features[i];
    if (row.size() != n) {
      throw ValidationError("fit_minmax: mixed feature lengths (" + std::to_string(n) + " vs " +
                            std::to_string(row.size()) + ")");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] < p.min[j]) p.min[j] = row[j];
      if (row[j] > p.max[j]) p.max[j] = row[j];
    }
  }
  return p;
}

NormParams fit_minmax(const std::vector<std::vector<double>>& features) {
  std::vector<const std::vector<double>*> ptrs;
  ptrs.reserve(features.size());
  for (const auto& f : features) ptrs.push_back(&f);
  return fit_minmax(ptrs);
}

NormParams fit_minmax(const std::vector<std::vector<double>>& features,
                      const std::vector<std::size_t>& idx) {
  std::vector<const std::vector<double>*> ptrs;
  ptrs.reserve(idx.size());
  for (std::size_t i : idx) ptrs.push_back(&features.at(i));
  return fit_minmax(ptrs);
}

std::vector<double> apply_minmax(const std::vector<double>& values, const NormParams& params) {
  if (values.size() != params.size()) {
    throw ValidationError("apply_minmax: feature length " + std::to_string(values.size()) +
                          " does not match params length " + std::to_string(params.size()));
  }
  std::vector<double> out(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double range = params.max[j] - params.min[j];
    out[j] = range == 0.0 ? 0.0 : (values[j] - params.min[j]) / range;
  }
  return out;
}

}  // namespace wmp
