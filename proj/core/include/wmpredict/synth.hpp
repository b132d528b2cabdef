#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "wmpredict/atlas.hpp"
#include "wmpredict/measure.hpp"
#include "wmpredict/table.hpp"

namespace wmp {

// Recipe for a synthetic cohort with recoverable demographic signal. Every
// cell starts as Normal(base_mean, base_sd) noise; the sex signal adds
// +sex_delta at sex_positions for male subjects of sex_measure; the age
// signal adds weight*age + Normal(0, age_noise_sd) at age_positions of
// age_measure. Generation is a pure function of the spec.
struct SynthSpec {
  std::size_t n_subjects = 0;
  int n_bilateral = 716;
  int n_commissural = 84;
  std::vector<MeasureId> measures;

  MeasureId sex_measure;                    // which table carries the sex signal
  std::vector<std::size_t> sex_positions;   // canonical 1D positions
  double sex_delta = 0.0;

  MeasureId age_measure;                    // which table carries the age signal
  std::vector<std::pair<std::size_t, double>> age_weights;  // (position, weight)
  double age_noise_sd = 0.0;

  double base_mean = 0.5;
  double base_sd = 0.1;
  double missing_rate = 0.01;

  // Cohort demographics: balanced sexes, ages clipped-normal in [22, 37].
  double age_mean = 28.71;
  double age_sd = 3.672;
  double age_min = 22.0;
  double age_max = 37.0;

  std::uint64_t seed = 0;
};

struct SynthBundle {
  std::shared_ptr<const AtlasLayout> layout;
  std::vector<ClusterMeasureTable> tables;  // aligned with spec.measures
  LabelTable labels;
};

SynthBundle generate(const SynthSpec& spec);

// Writes atlas.csv, labels.csv and measures/<name>.csv under dir, in exactly
// the ingestion formats. Byte-identical across runs for the same spec.
void write_bundle(const SynthBundle& bundle, const std::filesystem::path& dir);

}  // namespace wmp
