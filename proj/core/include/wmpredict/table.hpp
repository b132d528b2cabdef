#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "wmpredict/atlas.hpp"
#include "wmpredict/measure.hpp"

namespace wmp {

// Per-subject, per-cluster scalar values for one measure, with explicit
// missingness. Values are stored in the layout's canonical entry order.
class ClusterMeasureTable {
 public:
  ClusterMeasureTable(std::shared_ptr<const AtlasLayout> layout, MeasureId measure);

  const AtlasLayout& layout() const { return *layout_; }
  std::shared_ptr<const AtlasLayout> layout_ptr() const { return layout_; }
  MeasureId measure() const { return measure_; }

  const std::vector<std::string>& subjects() const { return subjects_; }
  bool has_subject(std::string_view id) const;
  std::size_t subject_pos(std::string_view id) const;  // throws if absent

  // Appends a subject row; values/missing are in canonical entry order.
  void add_subject(std::string subject_id, std::vector<double> values,
                   std::vector<std::uint8_t> missing);

  double value(std::size_t subject, std::size_t entry) const;
  bool is_missing(std::size_t subject, std::size_t entry) const;
  std::size_t n_missing() const;

  // Raw row access (canonical entry order), length = layout().size().
  const double* row(std::size_t subject) const;
  const std::uint8_t* missing_row(std::size_t subject) const;

  bool operator==(const ClusterMeasureTable& other) const;

 private:
  friend ClusterMeasureTable impute_missing(ClusterMeasureTable table);
  std::shared_ptr<const AtlasLayout> layout_;
  MeasureId measure_;
  std::vector<std::string> subjects_;
  std::unordered_map<std::string, std::size_t> subject_pos_;
  std::vector<double> values_;          // subjects x entries, row-major
  std::vector<std::uint8_t> missing_;   // parallel to values_
};

// Parses one wide measure CSV: header "subject_id,<cluster_id>,...". Cells
// that are empty or spell NaN are MISSING. Layout clusters absent from the
// header are MISSING for every subject. Rejects unknown cluster columns,
// duplicate subjects and non-numeric cells, naming the offending coordinates.
ClusterMeasureTable parse_measure_table(std::istream& in,
                                        std::shared_ptr<const AtlasLayout> layout,
                                        MeasureId measure);

// Replaces every MISSING cell with exactly 0.0. Present values are untouched;
// idempotent.
ClusterMeasureTable impute_missing(ClusterMeasureTable table);

// Writes the table back out in the measure-file format (MISSING as empty cell).
void write_measure_table(std::ostream& out, const ClusterMeasureTable& table);

struct FeatureVector {
  MeasureId measure;
  std::string subject_id;
  std::vector<double> values;  // canonical order, layout().size() long
};

struct FeatureMatrix {
  MeasureId measure;
  std::string subject_id;
  int rows = 3;
  int cols = 0;                // layout width
  std::vector<double> values;  // row-major 3 x cols; structurally empty cells are 0
  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * cols + col]; }
};

// Canonical 1D arrangement: right hemisphere by ascending atlas index, then
// left, then commissural. Requires a fully imputed table.
FeatureVector arrange_1d(const ClusterMeasureTable& table, const std::string& subject_id);

// 2D arrangement: row 0 = right, 1 = left, 2 = commissural; column =
// atlas_index - 1. Cells with no cluster in the layout are 0.
FeatureMatrix arrange_2d(const ClusterMeasureTable& table, const std::string& subject_id);

// Sex is encoded as class index: F = 0, M = 1.
struct LabelRow {
  int sex = 0;
  double age = 0.0;
};

class LabelTable {
 public:
  static LabelTable load_csv(std::istream& in);
  void save_csv(std::ostream& out) const;

  void add(const std::string& subject_id, int sex, double age);
  bool has(const std::string& subject_id) const;
  const LabelRow& row(const std::string& subject_id) const;  // throws if absent
  std::size_t size() const { return order_.size(); }
  const std::vector<std::string>& subjects() const { return order_; }

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, LabelRow> rows_;
};

}  // namespace wmp
