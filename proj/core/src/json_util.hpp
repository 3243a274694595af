#pragma once

// Internal helpers shared by checkpoint and config code; not installed.

#include <json.hpp>

#include "multiop/train.hpp"

namespace multiop::detail {

using Json = nlohmann::json;

Json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

/// FNV-1a 64-bit over the canonical (sorted-key, minimal) dump.
std::string fnv1a_hex(const std::string& text);

} // namespace multiop::detail
