#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wmp {

// One of the 14 per-cluster diffusion measures. FA/MD are computed per fitted
// tensor (1 or 2) and summarized by min/max/mean; fiber and point counts have
// no tensor or statistic.
enum class Quantity { FA, MD, NumFibers, NumPoints };
enum class Stat { Min, Max, Mean, None };

struct MeasureId {
  Quantity quantity = Quantity::FA;
  int tensor_index = 0;  // 1 or 2 for FA/MD, 0 for counts
  Stat stat = Stat::None;

  bool valid() const;
  // Canonical 1-based index: FA1-min=1 ... MD2-mean=12, Num_Fibers=13,
  // Num_Points=14.
  int index() const;
  std::string name() const;  // "FA1-mean", "MD2-max", "Num_Fibers", ...

  static const std::array<MeasureId, 14>& all();
  static MeasureId from_index(int index);               // throws on bad index
  static std::optional<MeasureId> parse(std::string_view text);

  auto operator<=>(const MeasureId&) const = default;
};

// Parses a comma-separated measure list; items may be canonical names or
// 1-based indices ("FA1-mean,13" == "FA1-mean,Num_Fibers"). "all" expands to
// all 14 measures. Throws ConfigError on unknown items or duplicates.
std::vector<MeasureId> parse_measure_list(std::string_view text);

}  // namespace wmp
