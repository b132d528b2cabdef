#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wmpredict/measure.hpp"
#include "wmpredict/nn/layers.hpp"
#include "wmpredict/normalize.hpp"

namespace wmp {

enum class Variant { CNN1D, CNN2D };
enum class Task { Sex, Age };

std::string_view variant_name(Variant v);  // "cnn1d" / "cnn2d"
std::string_view task_name(Task t);        // "sex" / "age"
std::optional<Variant> parse_variant(std::string_view s);
std::optional<Task> parse_task(std::string_view s);

// Architecture description. Three conv blocks (conv -> batchnorm -> relu ->
// dropout), a flatten, two hidden fully connected layers each followed by
// relu + dropout, and a linear head: 2 logits for sex, 1 real for age.
struct ModelSpec {
  Variant variant = Variant::CNN1D;
  Task task = Task::Sex;
  std::int64_t input_len = 1516;  // CNN1D
  std::int64_t input_rows = 3;    // CNN2D
  std::int64_t input_cols = 800;  // CNN2D
  std::int64_t filters = 64;
  std::vector<std::int64_t> fc_sizes = {512, 128};
  double conv_dropout = 0.5;
  double fc_dropout = 0.5;

  static constexpr int kConvBlocks = 3;
  static constexpr std::int64_t kKernel1d = 5;
  static constexpr std::int64_t kKernel2d = 3;

  std::int64_t head_size() const { return task == Task::Sex ? 2 : 1; }
  // Post-conv length for CNN1D: three valid kernel-5 convs shave 4 each.
  std::int64_t conv_out_len() const { return input_len - kConvBlocks * (kKernel1d - 1); }
  std::int64_t flatten_width() const;
  std::vector<std::int64_t> input_shape() const;  // without the batch dim
  std::int64_t flat_input_len() const;

  void validate() const;  // throws ConfigError

  std::string to_config() const;
  static ModelSpec from_config(const std::string& text);
};

nn::Net build_model(const ModelSpec& spec, std::uint64_t seed);

struct Prediction {
  Task task = Task::Sex;
  std::array<double, 2> probs = {0.0, 0.0};  // softmax over {F, M}, Sex only
  double value = 0.0;                        // years, Age only
  int label = -1;                            // decided class, Sex only
  int cls() const { return label >= 0 ? label : (probs[1] > probs[0] ? 1 : 0); }
};

// A fitted network bundled with everything predict() needs: the architecture,
// the normalization fitted on its training fold, and provenance.
struct TrainedModel {
  ModelSpec spec;
  MeasureId measure;
  std::uint64_t training_seed = 0;
  NormParams norm;
  std::shared_ptr<nn::Net> net;  // kept in eval mode

  // raw, unnormalized features of the model's input shape (flattened).
  Prediction predict(const std::vector<double>& raw_features) const;

  // Writes <path> (CNWT1 container) and <path minus extension>.meta (spec,
  // measure, seed, norm params).
  void save(const std::filesystem::path& model_file) const;
  static TrainedModel load(const std::filesystem::path& model_file);
};

std::filesystem::path sidecar_path(const std::filesystem::path& model_file);

}  // namespace wmp
