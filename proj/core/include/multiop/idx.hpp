#pragma once

#include <string>
#include <vector>

#include "multiop/numerics.hpp"

namespace multiop {

/// Loads an IDX image file (big-endian magic 0x00000803, then big-endian
/// 32-bit count/rows/cols, then row-major unsigned bytes) as flat vectors
/// with pixel values divided by 255. Malformed input throws FormatError
/// naming the byte offset.
std::vector<Vector> load_idx(const std::string& path);

} // namespace multiop
