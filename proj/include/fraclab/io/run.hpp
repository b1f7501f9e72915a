#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraclab/io/config.hpp"

namespace fraclab::io {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::string out_dir;                 // overrides config.output
  std::optional<std::uint64_t> seed;   // overrides config.seed
  unsigned threads = 1;
  bool emit_plots = false;
};

// A checked quantity of a run: passed iff value `relation` tolerance.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "==", or "info" (recorded, not asserted)
  bool passed = true;
};

struct Stage {
  std::string name;
  double residual = 0.0;  // largest solver residual inside the stage (0 if none)
  double seconds = 0.0;
  std::vector<Check> checks;
  std::string error;      // set when the stage threw
  [[nodiscard]] bool passed() const;
};

struct OutputFile {
  std::string path;  // relative to the output directory
  std::uintmax_t bytes = 0;
  std::string fnv1a;
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string started, finished;  // UTC, ISO 8601
  nlohmann::json config;          // with defaults applied
  std::string out_dir;
  std::vector<Stage> stages;
  std::vector<OutputFile> outputs;
  [[nodiscard]] bool passed() const;
};

// $FRACLAB_OUT, else "fraclab-out".
std::string default_output_root();

// Runs the pipeline of config.kind, writes report.json, CSV tables, plots
// (when requested) and manifest.json into the output directory.  Report,
// CSV and SVG bytes depend only on the config and the seed.
RunManifest run(const ExperimentConfig& config, const RunOptions& options = {});

nlohmann::json to_json(const RunManifest& m);

}  // namespace fraclab::io
