#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wmpredict/nn/layers.hpp"
#include "wmpredict/nn/tensor.hpp"

namespace wmp::nn {

// Flat binary tensor container:
//   magic "CNWT1" (5 bytes)
//   u64-le byte length of the manifest, then the manifest: tensor names
//   joined by '\n', UTF-8
//   per tensor in manifest order: u64-le rank, u64-le dims, then f64-le
//   IEEE-754 values in row-major order.
void save_tensors(std::ostream& out, const std::vector<std::string>& names,
                  const std::vector<const Tensor*>& tensors);

struct LoadedTensors {
  std::vector<std::string> names;
  std::vector<Tensor> tensors;
};

LoadedTensors load_tensors(std::istream& in);

// Saves a net's parameters and buffers under their manifest names.
void save_net(std::ostream& out, Net& net);

// Loads a container produced by save_net into a structurally identical net.
// Names and shapes must match exactly.
void load_net(std::istream& in, Net& net);

}  // namespace wmp::nn
