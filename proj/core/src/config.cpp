#include "multiop/config.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "multiop/errors.hpp"

namespace multiop {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::phase_transition: return "phase-transition";
    case ExperimentKind::moi_grid: return "moi-grid";
    case ExperimentKind::toy: return "toy";
    case ExperimentKind::identify: return "identify";
    case ExperimentKind::deconv: return "deconv";
    case ExperimentKind::train: return "train";
    case ExperimentKind::eval: return "eval";
  }
  throw ConfigError("unknown experiment kind enum value");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "phase-transition") return ExperimentKind::phase_transition;
  if (name == "moi-grid") return ExperimentKind::moi_grid;
  if (name == "toy") return ExperimentKind::toy;
  if (name == "identify") return ExperimentKind::identify;
  if (name == "deconv") return ExperimentKind::deconv;
  if (name == "train") return ExperimentKind::train;
  if (name == "eval") return ExperimentKind::eval;
  throw ConfigError("unknown experiment kind \"" + name +
                    "\" (expected one of: phase-transition, moi-grid, toy, "
                    "identify, deconv, train, eval)");
}

namespace {

// nlohmann reports parse errors by byte offset; translate to a line number.
int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

} // namespace

LoadedConfig parse_config(const std::string& json_text, const CliOverrides& overrides,
                          const std::string& origin) {
  detail::Json doc;
  try {
    doc = detail::Json::parse(json_text);
  } catch (const detail::Json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(line_of_byte(json_text, e.byte)) +
                      ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError(origin + ": top-level config must be a JSON object");
  }
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
    throw ConfigError(origin + ": missing string field \"experiment\"");
  }

  LoadedConfig out;
  out.kind = experiment_kind_from_string(doc["experiment"].get<std::string>());

  if (overrides.seed.has_value()) {
    doc["seed"] = *overrides.seed;
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw ConfigError(origin + ": \"seed\" must be a non-negative integer");
    }
    out.seed = doc["seed"].get<std::uint64_t>();
  } else {
    doc["seed"] = out.seed; // default 0, made explicit in the effective config
  }

  // Delivery knobs: recorded on the struct, stripped from the effective
  // config so output bytes depend only on experiment identity.
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) {
      throw ConfigError(origin + ": \"out\" must be a string path");
    }
    out.out_path = doc["out"].get<std::string>();
    doc.erase("out");
  }
  if (overrides.out.has_value()) out.out_path = *overrides.out;

  if (doc.contains("jobs")) {
    if (!doc["jobs"].is_number_integer()) {
      throw ConfigError(origin + ": \"jobs\" must be an integer");
    }
    out.jobs = doc["jobs"].get<int>();
    doc.erase("jobs");
  }
  if (overrides.jobs.has_value()) out.jobs = *overrides.jobs;
  if (out.jobs < 1) {
    throw ConfigError(origin + ": worker count must be at least 1");
  }

  out.canonical = doc.dump(); // nlohmann::json keeps object keys sorted
  out.config_hash = detail::fnv1a_hex(out.canonical);
  return out;
}

LoadedConfig load_config(const std::string& path, const CliOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides, path);
}

} // namespace multiop
