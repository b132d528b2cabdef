#include "wmpredict/nn/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "wmpredict/error.hpp"

namespace wmp::nn {

namespace {

constexpr char kMagic[5] = {'C', 'N', 'W', 'T', '1'};

void write_u64_le(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw ValidationError("model container truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64_le(std::ostream& out, double d) {
  write_u64_le(out, std::bit_cast<std::uint64_t>(d));
}

double read_f64_le(std::istream& in) { return std::bit_cast<double>(read_u64_le(in)); }

}  // namespace

void save_tensors(std::ostream& out, const std::vector<std::string>& names,
                  const std::vector<const Tensor*>& tensors) {
  if (names.size() != tensors.size()) throw Error("save_tensors: name/tensor count mismatch");
  out.write(kMagic, sizeof(kMagic));
  std::string manifest;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) manifest += '\n';
    manifest += names[i];
  }
  write_u64_le(out, manifest.size());
  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  for (const Tensor* t : tensors) {
    write_u64_le(out, static_cast<std::uint64_t>(t->rank()));
    for (std::int64_t d = 0; d < t->rank(); ++d) {
      write_u64_le(out, static_cast<std::uint64_t>(t->dim(d)));
    }
    for (std::int64_t i = 0; i < t->numel(); ++i) write_f64_le(out, (*t)[i]);
  }
  if (!out) throw Error("save_tensors: write failed");
}

LoadedTensors load_tensors(std::istream& in) {
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("not a CNWT1 model container");
  }
  const std::uint64_t manifest_len = read_u64_le(in);
  std::string manifest(manifest_len, '\0');
  in.read(manifest.data(), static_cast<std::streamsize>(manifest_len));
  if (!in) throw ValidationError("model container truncated in manifest");

  LoadedTensors loaded;
  if (!manifest.empty()) {
    std::size_t start = 0;
    while (start <= manifest.size()) {
      auto pos = manifest.find('\n', start);
      if (pos == std::string::npos) {
        loaded.names.push_back(manifest.substr(start));
        break;
      }
      loaded.names.push_back(manifest.substr(start, pos - start));
      start = pos + 1;
    }
  }
  for (std::size_t i = 0; i < loaded.names.size(); ++i) {
    const std::uint64_t rank = read_u64_le(in);
    if (rank > 8) throw ValidationError("model container: implausible tensor rank");
    std::vector<std::int64_t> shape(rank);
    for (auto& d : shape) d = static_cast<std::int64_t>(read_u64_le(in));
    Tensor t(shape);
    for (std::int64_t j = 0; j < t.numel(); ++j) t[j] = read_f64_le(in);
    loaded.tensors.push_back(std::move(t));
  }
  return loaded;
}

void save_net(std::ostream& out, Net& net) {
  auto named = net.named_tensors();
  std::vector<std::string> names;
  std::vector<const Tensor*> tensors;
  names.reserve(named.size());
  tensors.reserve(named.size());
  for (auto& [name, tensor] : named) {
    names.push_back(name);
    tensors.push_back(tensor);
  }
  save_tensors(out, names, tensors);
}

void load_net(std::istream& in, Net& net) {
  LoadedTensors loaded = load_tensors(in);
  auto named = net.named_tensors();
  if (loaded.names.size() != named.size()) {
    throw ValidationError("model container has " + std::to_string(loaded.names.size()) +
                          " tensors, net expects " + std::to_string(named.size()));
  }
  for (std::size_t i = 0; i < named.size(); ++i) {
    if (loaded.names[i] != named[i].first) {
      throw ValidationError("model container tensor '" + loaded.names[i] + "' does not match '" +
                            named[i].first + "'");
    }
    if (!loaded.tensors[i].same_shape(*named[i].second)) {
      throw ValidationError("model container tensor '" + loaded.names[i] + "' has shape " +
                            loaded.tensors[i].shape_str() + ", net expects " +
                            named[i].second->shape_str());
    }
    *named[i].second = std::move(loaded.tensors[i]);
  }
}

}  // namespace wmp::nn
