#include "wmpredict/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "wmpredict/error.hpp"
#include "wmpredict/rng.hpp"

namespace wmp {

namespace {

constexpr std::uint64_t kLabelStream = 0x4c41ULL;
constexpr std::uint64_t kMeasureStream = 0x4d450000ULL;

}  // namespace

SynthBundle generate(const SynthSpec& spec) {
  if (spec.n_subjects < 2) throw ConfigError("synth: need at least 2 subjects");
  if (spec.measures.empty()) throw ConfigError("synth: need at least one measure");
  if (spec.missing_rate < 0 || spec.missing_rate >= 1) {
    throw ConfigError("synth: missing_rate must be in [0, 1)");
  }
  if (spec.age_noise_sd < 0) throw ConfigError("synth: age_noise_sd must be >= 0");

  SynthBundle bundle;
  bundle.layout = std::make_shared<AtlasLayout>(
      make_synthetic_layout(spec.n_bilateral, spec.n_commissural));
  const std::size_t n_entries = bundle.layout->size();

  for (std::size_t pos : spec.sex_positions) {
    if (pos >= n_entries) {
      throw ConfigError("synth: sex signal position " + std::to_string(pos) +
                        " outside layout of size " + std::to_string(n_entries));
    }
  }
  for (const auto& [pos, weight] : spec.age_weights) {
    if (pos >= n_entries) {
      throw ConfigError("synth: age signal position " + std::to_string(pos) +
                        " outside layout of size " + std::to_string(n_entries));
    }
  }

  Rng root(spec.seed);

  // Labels: exactly balanced sexes shuffled across ids, ages clipped normal.
  Rng label_rng = root.child(kLabelStream);
  std::vector<int> sexes(spec.n_subjects);
  for (std::size_t i = 0; i < spec.n_subjects; ++i) sexes[i] = i < spec.n_subjects / 2 ? 1 : 0;
  label_rng.shuffle(sexes);
  char buf[32];
  std::vector<std::string> subject_ids(spec.n_subjects);
  for (std::size_t i = 0; i < spec.n_subjects; ++i) {
    std::snprintf(buf, sizeof(buf), "sub%04zu", i + 1);
    subject_ids[i] = buf;
    double age = spec.age_mean + spec.age_sd * label_rng.normal();
    age = std::clamp(age, spec.age_min, spec.age_max);
    bundle.labels.add(subject_ids[i], sexes[i], age);
  }

  for (std::size_t m = 0; m < spec.measures.size(); ++m) {
    const MeasureId measure = spec.measures[m];
    Rng rng = root.child(kMeasureStream + m);
    ClusterMeasureTable table(bundle.layout, measure);
    for (std::size_t s = 0; s < spec.n_subjects; ++s) {
      std::vector<double> values(n_entries);
      std::vector<std::uint8_t> missing(n_entries, 0);
      for (std::size_t e = 0; e < n_entries; ++e) {
        values[e] = spec.base_mean + spec.base_sd * rng.normal();
      }
      if (measure == spec.sex_measure && sexes[s] == 1) {
        for (std::size_t pos : spec.sex_positions) values[pos] += spec.sex_delta;
      }
      if (measure == spec.age_measure) {
        const double age = bundle.labels.row(subject_ids[s]).age;
        for (const auto& [pos, weight] : spec.age_weights) {
          values[pos] += weight * age + spec.age_noise_sd * rng.normal();
        }
      }
      if (spec.missing_rate > 0) {
        for (std::size_t e = 0; e < n_entries; ++e) {
          if (rng.uniform() < spec.missing_rate) missing[e] = 1;
        }
      }
      table.add_subject(subject_ids[s], std::move(values), std::move(missing));
    }
    bundle.tables.push_back(std::move(table));
  }
  return bundle;
}

void write_bundle(const SynthBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "measures");
  {
    std::ofstream out(dir / "atlas.csv");
    if (!out) throw ConfigError("cannot write " + (dir / "atlas.csv").string());
    bundle.layout->save_csv(out);
  }
  {
    std::ofstream out(dir / "labels.csv");
    if (!out) throw ConfigError("cannot write " + (dir / "labels.csv").string());
    bundle.labels.save_csv(out);
  }
  for (const ClusterMeasureTable& table : bundle.tables) {
    const auto path = dir / "measures" / (table.measure().name() + ".csv");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    write_measure_table(out, table);
  }
}

}  // namespace wmp
