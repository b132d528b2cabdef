#pragma once

#include <cstddef>
#include <vector>

namespace wmp {

// Per-position min/max fitted on training-fold features only. Positions are
// the flattened feature layout (1516 for the full 1D vector, 3*800 for the
// flattened 2D matrix).
struct NormParams {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const { return min.size(); }
  bool operator==(const NormParams&) const = default;
};

// Fits per-position min/max over the given feature rows (all rows must share
// one length). Throws on an empty list or mixed lengths.
NormParams fit_minmax(const std::vector<const std::vector<double>*>& features);
NormParams fit_minmax(const std::vector<std::vector<double>>& features);
// Convenience for fold splits: fit on features[idx] only.
NormParams fit_minmax(const std::vector<std::vector<double>>& features,
                      const std::vector<std::size_t>& idx);

// (v - min) / (max - min) per position; positions with min == max map to 0.
// Out-of-range inputs (test folds) are not clamped.
std::vector<double> apply_minmax(const std::vector<double>& values, const NormParams& params);

}  // namespace wmp
