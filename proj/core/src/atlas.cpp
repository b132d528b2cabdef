#include "wmpredict/atlas.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "wmpredict/csv.hpp"
#include "wmpredict/error.hpp"

namespace wmp {

std::string_view category_name(Category c) {
  switch (c) {
    case Category::Right: return "right";
    case Category::Left: return "left";
    case Category::Commissural: return "comm";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view s) {
  if (s == "right") return Category::Right;
  if (s == "left") return Category::Left;
  if (s == "comm") return Category::Commissural;
  return std::nullopt;
}

namespace {

int category_rank(Category c) {
  switch (c) {
    case Category::Right: return 0;
    case Category::Left: return 1;
    case Category::Commissural: return 2;
  }
  return 3;
}

}  // namespace

AtlasLayout AtlasLayout::from_entries(std::vector<AtlasEntry> entries) {
  if (entries.empty()) throw ValidationError("atlas layout has no entries");

  std::sort(entries.begin(), entries.end(), [](const AtlasEntry& a, const AtlasEntry& b) {
    if (category_rank(a.category) != category_rank(b.category)) {
      return category_rank(a.category) < category_rank(b.category);
    }
    return a.atlas_index < b.atlas_index;
  });

  AtlasLayout layout;
  // index -> bitmask of categories seen (1=right, 2=left, 4=comm)
  std::map<int, int> index_categories;
  for (const AtlasEntry& e : entries) {
    if (e.atlas_index < 1) {
      throw ValidationError("cluster '" + e.cluster_id + "' has atlas_index " +
                            std::to_string(e.atlas_index) + ", expected >= 1");
    }
    auto [it, fresh] = layout.position_.emplace(e.cluster_id, layout.entries_.size());
    if (!fresh) throw ValidationError("duplicate cluster_id '" + e.cluster_id + "'");
    int bit = 1 << category_rank(e.category);
    int& mask = index_categories[e.atlas_index];
    if (mask & bit) {
      throw ValidationError("atlas_index " + std::to_string(e.atlas_index) +
                            " appears twice in category " +
                            std::string(category_name(e.category)));
    }
    mask |= bit;
    layout.width_ = std::max(layout.width_, e.atlas_index);
    layout.entries_.push_back(e);
  }

  for (const auto& [index, mask] : index_categories) {
    if (mask == (1 | 2)) {
      ++layout.n_bilateral_;
    } else if (mask == 4) {
      ++layout.n_commissural_;
    } else {
      throw ValidationError(
          "atlas_index " + std::to_string(index) +
          " must appear either once per hemisphere or once as commissural");
    }
  }
  return layout;
}

AtlasLayout AtlasLayout::load_csv(std::istream& in) {
  CsvTable csv = read_csv(in, "atlas layout");
  const std::vector<std::string> expected = {"cluster_id", "category", "atlas_index"};
  if (csv.header != expected) {
    throw ValidationError("atlas layout: expected header cluster_id,category,atlas_index");
  }
  std::vector<AtlasEntry> entries;
  entries.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    AtlasEntry e;
    e.cluster_id = row[0];
    auto cat = parse_category(row[1]);
    if (!cat) {
      throw ValidationError("atlas layout: unknown category '" + row[1] + "' for cluster '" +
                            row[0] + "'");
    }
    e.category = *cat;
    auto idx = parse_double(row[2]);
    if (!idx || *idx != static_cast<int>(*idx)) {
      throw ValidationError("atlas layout: bad atlas_index '" + row[2] + "' for cluster '" +
                            row[0] + "'");
    }
    e.atlas_index = static_cast<int>(*idx);
    entries.push_back(std::move(e));
  }
  return from_entries(std::move(entries));
}

void AtlasLayout::save_csv(std::ostream& out) const {
  out << "cluster_id,category,atlas_index\n";
  for (const AtlasEntry& e : entries_) {
    out << e.cluster_id << ',' << category_name(e.category) << ',' << e.atlas_index << '\n';
  }
}

std::optional<std::size_t> AtlasLayout::position_of(std::string_view cluster_id) const {
  auto it = position_.find(std::string(cluster_id));
  if (it == position_.end()) return std::nullopt;
  return it->second;
}

bool AtlasLayout::is_full_atlas() const {
  return n_bilateral_ == kFullBilateral && n_commissural_ == kFullCommissural &&
         width_ == kFullIndices;
}

void AtlasLayout::require_full() const {
  if (!is_full_atlas()) {
    throw ValidationError(
        "layout is not the full atlas: expected " + std::to_string(kFullEntries) +
        " entries (716 bilateral + 84 commissural indices), got " + std::to_string(size()) +
        " entries (" + std::to_string(n_bilateral_) + " bilateral, " +
        std::to_string(n_commissural_) + " commissural)");
  }
}

AtlasLayout make_synthetic_layout(int n_bilateral, int n_commissural) {
  if (n_bilateral < 0 || n_commissural < 0 || n_bilateral + n_commissural < 1) {
    throw ConfigError("synthetic layout needs at least one cluster");
  }
  std::vector<AtlasEntry> entries;
  entries.reserve(static_cast<std::size_t>(2 * n_bilateral + n_commissural));
  char buf[32];
  for (int i = 1; i <= n_bilateral; ++i) {
    std::snprintf(buf, sizeof(buf), "c%04d_right", i);
    entries.push_back({buf, Category::Right, i});
    std::snprintf(buf, sizeof(buf), "c%04d_left", i);
    entries.push_back({buf, Category::Left, i});
  }
  for (int i = n_bilateral + 1; i <= n_bilateral + n_commissural; ++i) {
    std::snprintf(buf, sizeof(buf), "c%04d_comm", i);
    entries.push_back({buf, Category::Commissural, i});
  }
  return AtlasLayout::from_entries(std::move(entries));
}

AtlasLayout make_full_layout() {
  return make_synthetic_layout(AtlasLayout::kFullBilateral, AtlasLayout::kFullCommissural);
}

}  // namespace wmp
