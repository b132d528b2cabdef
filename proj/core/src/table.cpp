#include "wmpredict/table.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "wmpredict/csv.hpp"
#include "wmpredict/error.hpp"

namespace wmp {

ClusterMeasureTable::ClusterMeasureTable(std::shared_ptr<const AtlasLayout> layout,
                                         MeasureId measure)
    : layout_(std::move(layout)), measure_(measure) {
  if (!layout_) throw ValidationError("measure table needs a layout");
  if (!measure_.valid()) throw ValidationError("measure table needs a valid MeasureId");
}

bool ClusterMeasureTable::has_subject(std::string_view id) const {
  return subject_pos_.contains(std::string(id));
}

std::size_t ClusterMeasureTable::subject_pos(std::string_view id) const {
  auto it = subject_pos_.find(std::string(id));
  if (it == subject_pos_.end()) {
    throw ValidationError("unknown subject '" + std::string(id) + "'");
  }
  return it->second;
}

void ClusterMeasureTable::add_subject(std::string subject_id, std::vector<double> values,
                                      std::vector<std::uint8_t> missing) {
  const std::size_t n = layout_->size();
  if (values.size() != n || missing.size() != n) {
    throw ValidationError("subject row length does not match layout");
  }
  auto [it, fresh] = subject_pos_.emplace(subject_id, subjects_.size());
  if (!fresh) throw ValidationError("duplicate subject_id '" + subject_id + "'");
  subjects_.push_back(std::move(subject_id));
  values_.insert(values_.end(), values.begin(), values.end());
  missing_.insert(missing_.end(), missing.begin(), missing.end());
}

double ClusterMeasureTable::value(std::size_t subject, std::size_t entry) const {
  return values_[subject * layout_->size() + entry];
}

bool ClusterMeasureTable::is_missing(std::size_t subject, std::size_t entry) const {
  return missing_[subject * layout_->size() + entry] != 0;
}

std::size_t ClusterMeasureTable::n_missing() const {
  std::size_t n = 0;
  for (std::uint8_t m : missing_) n += m;
  return n;
}

const double* ClusterMeasureTable::row(std::size_t subject) const {
  return values_.data() + subject * layout_->size();
}

const std::uint8_t* ClusterMeasureTable::missing_row(std::size_t subject) const {
  return missing_.data() + subject * layout_->size();
}

bool ClusterMeasureTable::operator==(const ClusterMeasureTable& other) const {
  return measure_ == other.measure_ && subjects_ == other.subjects_ &&
         values_ == other.values_ && missing_ == other.missing_;
}

ClusterMeasureTable parse_measure_table(std::istream& in,
                                        std::shared_ptr<const AtlasLayout> layout,
                                        MeasureId measure) {
  if (!layout) throw ValidationError("parse_measure_table: null layout");
  CsvTable csv = read_csv(in, "measure file " + measure.name());
  if (csv.header.empty() || csv.header[0] != "subject_id") {
    throw ValidationError("measure file " + measure.name() +
                          ": first header column must be subject_id");
  }

  // Column -> canonical entry position.
  std::vector<std::size_t> col_entry(csv.header.size(), 0);
  for (std::size_t c = 1; c < csv.header.size(); ++c) {
    auto pos = layout->position_of(csv.header[c]);
    if (!pos) {
      throw ValidationError("measure file " + measure.name() + ": unknown cluster column '" +
                            csv.header[c] + "'");
    }
    col_entry[c] = *pos;
  }

  ClusterMeasureTable table(layout, measure);
  const std::size_t n_entries = layout->size();
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    // Layout clusters without a column stay MISSING.
    std::vector<double> values(n_entries, 0.0);
    std::vector<std::uint8_t> missing(n_entries, 1);
    for (std::size_t c = 1; c < row.size(); ++c) {
      const std::string& cell = row[c];
      if (cell.empty()) continue;  // MISSING
      auto v = parse_double(cell);
      if (!v) {
        throw ValidationError("measure file " + measure.name() + ": non-numeric cell '" + cell +
                              "' at subject '" + row[0] + "', column '" + csv.header[c] + "'");
      }
      if (std::isnan(*v)) continue;  // literal NaN is MISSING
      values[col_entry[c]] = *v;
      missing[col_entry[c]] = 0;
    }
    table.add_subject(row[0], std::move(values), std::move(missing));
  }
  return table;
}

ClusterMeasureTable impute_missing(ClusterMeasureTable table) {
  for (std::size_t i = 0; i < table.values_.size(); ++i) {
    if (table.missing_[i]) {
      table.values_[i] = 0.0;
      table.missing_[i] = 0;
    }
  }
  return table;
}

void write_measure_table(std::ostream& out, const ClusterMeasureTable& table) {
  out << "subject_id";
  for (const AtlasEntry& e : table.layout().entries()) out << ',' << e.cluster_id;
  out << '\n';
  const std::size_t n = table.layout().size();
  for (std::size_t s = 0; s < table.subjects().size(); ++s) {
    out << table.subjects()[s];
    for (std::size_t e = 0; e < n; ++e) {
      out << ',';
      if (!table.is_missing(s, e)) out << format_double(table.value(s, e));
    }
    out << '\n';
  }
}

namespace {

std::size_t require_imputed_subject(const ClusterMeasureTable& table,
                                    const std::string& subject_id) {
  std::size_t s = table.subject_pos(subject_id);
  const std::uint8_t* miss = table.missing_row(s);
  for (std::size_t e = 0; e < table.layout().size(); ++e) {
    if (miss[e]) {
      throw ValidationError("table for " + table.measure().name() +
                            " still has MISSING cells; impute before arranging");
    }
  }
  return s;
}

}  // namespace

FeatureVector arrange_1d(const ClusterMeasureTable& table, const std::string& subject_id) {
  std::size_t s = require_imputed_subject(table, subject_id);
  FeatureVector fv;
  fv.measure = table.measure();
  fv.subject_id = subject_id;
  const double* row = table.row(s);
  fv.values.assign(row, row + table.layout().size());
  return fv;
}

FeatureMatrix arrange_2d(const ClusterMeasureTable& table, const std::string& subject_id) {
  std::size_t s = require_imputed_subject(table, subject_id);
  const AtlasLayout& layout = table.layout();
  FeatureMatrix fm;
  fm.measure = table.measure();
  fm.subject_id = subject_id;
  fm.cols = layout.width();
  fm.values.assign(static_cast<std::size_t>(3) * fm.cols, 0.0);
  const double* row = table.row(s);
  for (std::size_t e = 0; e < layout.size(); ++e) {
    const AtlasEntry& entry = layout.entries()[e];
    int r = entry.category == Category::Right  ? 0
            : entry.category == Category::Left ? 1
                                               : 2;
    fm.values[static_cast<std::size_t>(r) * fm.cols + (entry.atlas_index - 1)] = row[e];
  }
  return fm;
}

LabelTable LabelTable::load_csv(std::istream& in) {
  CsvTable csv = read_csv(in, "label file");
  const std::vector<std::string> expected = {"subject_id", "sex", "age"};
  if (csv.header != expected) {
    throw ValidationError("label file: expected header subject_id,sex,age");
  }
  LabelTable t;
  for (const auto& row : csv.rows) {
    int sex;
    if (row[1] == "F") {
      sex = 0;
    } else if (row[1] == "M") {
      sex = 1;
    } else {
      throw ValidationError("label file: sex must be M or F, got '" + row[1] + "' for subject '" +
                            row[0] + "'");
    }
    auto age = parse_double(row[2]);
    if (!age || std::isnan(*age) || *age <= 0) {
      throw ValidationError("label file: bad age '" + row[2] + "' for subject '" + row[0] + "'");
    }
    t.add(row[0], sex, *age);
  }
  return t;
}

void LabelTable::save_csv(std::ostream& out) const {
  out << "subject_id,sex,age\n";
  for (const std::string& id : order_) {
    const LabelRow& r = rows_.at(id);
    out << id << ',' << (r.sex == 1 ? 'M' : 'F') << ',' << format_double(r.age) << '\n';
  }
}

void LabelTable::add(const std::string& subject_id, int sex, double age) {
  if (age <= 0) throw ValidationError("age must be positive for subject '" + subject_id + "'");
  auto [it, fresh] = rows_.emplace(subject_id, LabelRow{sex, age});
  if (!fresh) throw ValidationError("duplicate subject_id '" + subject_id + "' in label table");
  order_.push_back(subject_id);
}

bool LabelTable::has(const std::string& subject_id) const { return rows_.contains(subject_id); }

const LabelRow& LabelTable::row(const std::string& subject_id) const {
  auto it = rows_.find(subject_id);
  if (it == rows_.end()) {
    throw ValidationError("subject '" + subject_id + "' has no label row");
  }
  return it->second;
}

}  // namespace wmp
