#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace multiop {

enum class ExperimentKind {
  phase_transition,
  moi_grid,
  toy,
  identify,
  deconv,
  train,
  eval
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

/// An experiment config after parsing and CLI overrides. `canonical` is the
/// sorted-key minimal JSON of the effective experiment (seed included;
/// output path and worker count deliberately excluded, so neither affects
/// results or their provenance hash).
struct LoadedConfig {
  ExperimentKind kind = ExperimentKind::toy;
  std::uint64_t seed = 0;
  std::string out_path;
  int jobs = 1;
  std::string canonical;
  std::string config_hash; // FNV-1a 64 over canonical, hex
};

/// Reads and validates a JSON config file. Malformed JSON raises ConfigError
/// with the line number; unknown experiment kinds and bad values raise
/// ConfigError too.
LoadedConfig load_config(const std::string& path, const CliOverrides& overrides);

/// Same, from in-memory text (`origin` names the source in error messages).
LoadedConfig parse_config(const std::string& json_text, const CliOverrides& overrides,
                          const std::string& origin = "<config>");

} // namespace multiop
