#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraclab/geometry.hpp"

namespace fraclab::io {

enum class ExperimentKind {
  GeometryCheck,
  FractionalApply,
  SolveExtension,
  BarrierCheck,
  SlideParaboloids,
  Harnack,
  SchauderDecay,
  EndToEnd,
};

inline constexpr int kSchemaVersion = 1;

std::string_view kind_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view name);
const std::vector<ExperimentKind>& all_kinds();

// One experiment.  `params` holds the kind-specific parameters with every
// default filled in; see describe_schema for the keys.
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ExperimentKind kind = ExperimentKind::GeometryCheck;
  FractionalSetup setup;
  std::uint64_t seed = 20240601;
  std::string output;  // empty: $FRACLAB_OUT or ./fraclab-out
  nlohmann::json params = nlohmann::json::object();
};

// Every problem found while reading a config, one message per issue.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  [[nodiscard]] const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Strict JSON reader: unknown keys, wrong types and out-of-range values are
// all reported together; parse errors carry line and column.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::string& path);
ExperimentConfig default_config(ExperimentKind kind);

// Full config with defaults, as JSON.
nlohmann::json to_json(const ExperimentConfig& config);
// Pretty-printed config that parse_config reads back.
std::string emit_config(const ExperimentConfig& config);
// Compact sorted-key JSON of everything except `output`; the hash input.
std::string canonicalize(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);
// 16 lowercase hex digits of fnv1a64(canonicalize(config)).
std::string config_hash(const ExperimentConfig& config);

// Human-readable table of keys, defaults and ranges for a kind.
std::string describe_schema(ExperimentKind kind);

}  // namespace fraclab::io
