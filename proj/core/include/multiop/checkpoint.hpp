#pragma once

#include <string>

#include "multiop/mlp.hpp"
#include "multiop/train.hpp"

namespace multiop {

/// Self-describing binary checkpoint: 8-byte magic "MOPSCKPT", little-endian
/// u32 format version and JSON header length, a JSON header (layer sizes,
/// activation tag, residual flag, training config, seed), then per layer the
/// weight matrix row-major and the bias, all little-endian 64-bit floats.
struct Checkpoint {
  Mlp net;
  TrainConfig train;
};

void save_checkpoint(const std::string& path, const Mlp& net, const TrainConfig& train);

/// Throws FormatError (naming the byte offset) on malformed input.
Checkpoint load_checkpoint(const std::string& path);

} // namespace multiop
