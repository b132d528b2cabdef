#include "wmpredict/model.hpp"

#include <fstream>
#include <sstream>

#include "wmpredict/csv.hpp"
#include "wmpredict/error.hpp"
#include "wmpredict/nn/loss.hpp"
#include "wmpredict/nn/serialize.hpp"

namespace wmp {

std::string_view variant_name(Variant v) { return v == Variant::CNN1D ? "cnn1d" : "cnn2d"; }
std::string_view task_name(Task t) { return t == Task::Sex ? "sex" : "age"; }

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "cnn1d") return Variant::CNN1D;
  if (s == "cnn2d") return Variant::CNN2D;
  return std::nullopt;
}

std::optional<Task> parse_task(std::string_view s) {
  if (s == "sex") return Task::Sex;
  if (s == "age") return Task::Age;
  return std::nullopt;
}

std::int64_t ModelSpec::flatten_width() const {
  if (variant == Variant::CNN1D) return filters * conv_out_len();
  return filters * input_rows * input_cols;
}

std::vector<std::int64_t> ModelSpec::input_shape() const {
  if (variant == Variant::CNN1D) return {1, input_len};
  return {1, input_rows, input_cols};
}

std::int64_t ModelSpec::flat_input_len() const {
  return variant == Variant::CNN1D ? input_len : input_rows * input_cols;
}

void ModelSpec::validate() const {
  if (variant == Variant::CNN1D) {
    if (conv_out_len() < 1) {
      throw ConfigError("cnn1d input length " + std::to_string(input_len) +
                        " too short for three kernel-5 convolutions");
    }
  } else {
    if (input_rows < 1 || input_cols < 1) throw ConfigError("cnn2d input shape must be positive");
  }
  if (filters < 1) throw ConfigError("filters must be >= 1");
  if (fc_sizes.size() != 2 || fc_sizes[0] < 1 || fc_sizes[1] < 1) {
    throw ConfigError("fc_sizes must be two positive layer widths");
  }
  if (conv_dropout < 0 || conv_dropout >= 1 || fc_dropout < 0 || fc_dropout >= 1) {
    throw ConfigError("dropout rates must be in [0, 1)");
  }
}

std::string ModelSpec::to_config() const {
  std::ostringstream out;
  out << "variant=" << variant_name(variant) << '\n';
  out << "task=" << task_name(task) << '\n';
  if (variant == Variant::CNN1D) {
    out << "input_len=" << input_len << '\n';
  } else {
    out << "input_rows=" << input_rows << '\n';
    out << "input_cols=" << input_cols << '\n';
  }
  out << "filters=" << filters << '\n';
  out << "fc1=" << fc_sizes[0] << '\n';
  out << "fc2=" << fc_sizes[1] << '\n';
  out << "conv_dropout=" << format_double(conv_dropout) << '\n';
  out << "fc_dropout=" << format_double(fc_dropout) << '\n';
  return out.str();
}

ModelSpec ModelSpec::from_config(const std::string& text) {
  ModelSpec spec;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model config: bad line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    auto num = [&]() {
      auto v = parse_double(value);
      if (!v) throw ConfigError("model config: bad value for " + key);
      return *v;
    };
    if (key == "variant") {
      auto v = parse_variant(value);
      if (!v) throw ConfigError("model config: unknown variant '" + value + "'");
      spec.variant = *v;
    } else if (key == "task") {
      auto t = parse_task(value);
      if (!t) throw ConfigError("model config: unknown task '" + value + "'");
      spec.task = *t;
    } else if (key == "input_len") {
      spec.input_len = static_cast<std::int64_t>(num());
    } else if (key == "input_rows") {
      spec.input_rows = static_cast<std::int64_t>(num());
    } else if (key == "input_cols") {
      spec.input_cols = static_cast<std::int64_t>(num());
    } else if (key == "filters") {
      spec.filters = static_cast<std::int64_t>(num());
    } else if (key == "fc1") {
      spec.fc_sizes[0] = static_cast<std::int64_t>(num());
    } else if (key == "fc2") {
      spec.fc_sizes[1] = static_cast<std::int64_t>(num());
    } else if (key == "conv_dropout") {
      spec.conv_dropout = num();
    } else if (key == "fc_dropout") {
      spec.fc_dropout = num();
    } else {
      throw ConfigError("model config: unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

nn::Net build_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  nn::Net net(seed);
  std::int64_t ch = 1;
  for (int block = 0; block < ModelSpec::kConvBlocks; ++block) {
    if (spec.variant == Variant::CNN1D) {
      net.emplace<nn::Conv1d>(ch, spec.filters, ModelSpec::kKernel1d, net.rng());
    } else {
      net.emplace<nn::Conv2d>(ch, spec.filters, ModelSpec::kKernel2d, 1, net.rng());
    }
    net.emplace<nn::BatchNorm>(spec.filters);
    net.emplace<nn::ReLU>();
    net.emplace<nn::Dropout>(spec.conv_dropout, net.rng());
    ch = spec.filters;
  }
  net.emplace<nn::Flatten>();
  std::int64_t width = spec.flatten_width();
  for (std::int64_t fc : spec.fc_sizes) {
    net.emplace<nn::Linear>(width, fc, net.rng());
    net.emplace<nn::ReLU>();
    net.emplace<nn::Dropout>(spec.fc_dropout, net.rng());
    width = fc;
  }
  net.emplace<nn::Linear>(width, spec.head_size(), net.rng());
  return net;
}

Prediction TrainedModel::predict(const std::vector<double>& raw_features) const {
  if (!net) throw Error("predict: model has no network");
  if (static_cast<std::int64_t>(raw_features.size()) != spec.flat_input_len()) {
    throw ValidationError("predict: feature length " + std::to_string(raw_features.size()) +
                          " does not match model input " +
                          std::to_string(spec.flat_input_len()));
  }
  std::vector<double> normed = apply_minmax(raw_features, norm);
  std::vector<std::int64_t> shape = spec.input_shape();
  shape.insert(shape.begin(), 1);  // batch of one
  nn::Tensor x = nn::Tensor::from(shape, std::move(normed));
  net->set_mode(nn::Mode::Eval);
  nn::Tensor out = net->forward(x);
  Prediction pred;
  pred.task = spec.task;
  if (spec.task == Task::Sex) {
    nn::Tensor probs = nn::softmax(out);
    pred.probs = {probs[0], probs[1]};
    pred.label = pred.probs[1] > pred.probs[0] ? 1 : 0;
  } else {
    pred.value = out[0];
  }
  return pred;
}

std::filesystem::path sidecar_path(const std::filesystem::path& model_file) {
  std::filesystem::path p = model_file;
  p.replace_extension(".meta");
  return p;
}

void TrainedModel::save(const std::filesystem::path& model_file) const {
  if (!net) throw Error("save: model has no network");
  {
    std::ofstream out(model_file, std::ios::binary);
    if (!out) throw ConfigError("cannot write model file " + model_file.string());
    nn::save_net(out, *net);
  }
  std::ofstream meta(sidecar_path(model_file));
  if (!meta) throw ConfigError("cannot write model sidecar " + sidecar_path(model_file).string());
  meta << "format=wmpredict-model-meta-1\n";
  meta << "measure=" << measure.name() << '\n';
  meta << "seed=" << training_seed << '\n';
  meta << spec.to_config();
  meta << "norm_params=" << norm.size() << '\n';
  meta << "position,min,max\n";
  for (std::size_t i = 0; i < norm.size(); ++i) {
    meta << i << ',' << format_double(norm.min[i]) << ',' << format_double(norm.max[i]) << '\n';
  }
}

TrainedModel TrainedModel::load(const std::filesystem::path& model_file) {
  std::ifstream meta(sidecar_path(model_file));
  if (!meta) throw ConfigError("cannot read model sidecar " + sidecar_path(model_file).string());
  std::string line;
  if (!std::getline(meta, line) || line != "format=wmpredict-model-meta-1") {
    throw ValidationError("model sidecar: unknown format line '" + line + "'");
  }
  TrainedModel model;
  std::string spec_text;
  std::size_t n_norm = 0;
  while (std::getline(meta, line)) {
    if (line.rfind("measure=", 0) == 0) {
      auto id = MeasureId::parse(line.substr(8));
      if (!id) throw ValidationError("model sidecar: unknown measure '" + line.substr(8) + "'");
      model.measure = *id;
    } else if (line.rfind("seed=", 0) == 0) {
      model.training_seed = std::stoull(line.substr(5));
    } else if (line.rfind("norm_params=", 0) == 0) {
      n_norm = std::stoull(line.substr(12));
      break;
    } else {
      spec_text += line;
      spec_text += '\n';
    }
  }
  model.spec = ModelSpec::from_config(spec_text);
  if (!std::getline(meta, line) || line != "position,min,max") {
    throw ValidationError("model sidecar: missing norm params header");
  }
  model.norm.min.resize(n_norm);
  model.norm.max.resize(n_norm);
  for (std::size_t i = 0; i < n_norm; ++i) {
    if (!std::getline(meta, line)) throw ValidationError("model sidecar: truncated norm params");
    auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ValidationError("model sidecar: bad norm params row");
    auto mn = parse_double(cells[1]);
    auto mx = parse_double(cells[2]);
    if (!mn || !mx) throw ValidationError("model sidecar: bad norm params row");
    model.norm.min[i] = *mn;
    model.norm.max[i] = *mx;
  }
  if (model.norm.size() != static_cast<std::size_t>(model.spec.flat_input_len())) {
    throw ValidationError("model sidecar: norm params length does not match input shape");
  }

  model.net = std::make_shared<nn::Net>(build_model(model.spec, model.training_seed));
  std::ifstream bin(model_file, std::ios::binary);
  if (!bin) throw ConfigError("cannot read model file " + model_file.string());
  nn::load_net(bin, *model.net);
  model.net->set_mode(nn::Mode::Eval);
  return model;
}

}  // namespace wmp
