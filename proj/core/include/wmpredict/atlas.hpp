#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wmp {

enum class Category { Right, Left, Commissural };

std::string_view category_name(Category c);                 // "right"/"left"/"comm"
std::optional<Category> parse_category(std::string_view s);

struct AtlasEntry {
  std::string cluster_id;
  Category category = Category::Right;
  int atlas_index = 0;  // 1-based column number in the 2D arrangement
};

// Immutable cluster-to-position mapping. Entries are held in the canonical
// feature order: all right-hemisphere clusters by ascending atlas index, then
// all left, then commissural. The full atlas has 716 bilateral indices plus
// 84 commissural ones (800 indices, 716*2+84 = 1516 entries); smaller layouts
// with the same structure are accepted for testing.
class AtlasLayout {
 public:
  static constexpr int kFullBilateral = 716;
  static constexpr int kFullCommissural = 84;
  static constexpr int kFullIndices = 800;
  static constexpr int kFullEntries = 1516;

  static AtlasLayout from_entries(std::vector<AtlasEntry> entries);
  static AtlasLayout load_csv(std::istream& in);
  void save_csv(std::ostream& out) const;

  const std::vector<AtlasEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  int width() const { return width_; }  // max atlas index = 2D column count
  std::size_t n_bilateral() const { return n_bilateral_; }
  std::size_t n_commissural() const { return n_commissural_; }

  // Position of a cluster in the canonical order, if present.
  std::optional<std::size_t> position_of(std::string_view cluster_id) const;

  bool is_full_atlas() const;
  // Throws ValidationError citing the expected 1516 entries when this layout
  // is not the full 716/716/84 atlas.
  void require_full() const;

 private:
  AtlasLayout() = default;
  std::vector<AtlasEntry> entries_;
  std::unordered_map<std::string, std::size_t> position_;
  int width_ = 0;
  std::size_t n_bilateral_ = 0;
  std::size_t n_commissural_ = 0;
};

// A layout in the synthetic-fixture shape: bilateral indices 1..n_bilateral,
// commissural indices n_bilateral+1..n_bilateral+n_commissural, cluster ids
// "c%04d_right|left|comm". make_full_layout() yields the 1516-entry atlas.
AtlasLayout make_synthetic_layout(int n_bilateral, int n_commissural);
AtlasLayout make_full_layout();

}  // namespace wmp
