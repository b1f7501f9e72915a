#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include "fraclab/io/config.hpp"
#include "fraclab/io/run.hpp"

using namespace fraclab::io;

namespace {

struct Flags {
  std::string config;
  std::string out;
  long long seed = -1;
  unsigned threads = 0;
  bool emit_plots = false;
  bool print_config = false;
};

int execute(ExperimentKind kind, const Flags& f) {
  ExperimentConfig config;
  try {
    config = f.config.empty() ? default_config(kind) : load_config(f.config);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  if (config.kind != kind) {
    std::cerr << f.config << ": kind \"" << kind_name(config.kind) << "\" does not match subcommand \""
              << kind_name(kind) << "\"\n";
    return 2;
  }
  if (f.print_config) {
    std::cout << emit_config(config);
    return 0;
  }
  RunOptions opts;
  opts.out_dir = f.out;
  if (f.seed >= 0) opts.seed = static_cast<std::uint64_t>(f.seed);
  opts.threads = f.threads ? f.threads : std::max(1u, std::thread::hardware_concurrency());
  opts.emit_plots = f.emit_plots;

  RunManifest m;
  try {
    m = run(config, opts);
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
  for (const auto& st : m.stages) {
    std::printf("[%s] %s (%.2f s)\n", st.passed() ? " ok " : "FAIL", st.name.c_str(), st.seconds);
    if (!st.error.empty()) std::printf("       error: %s\n", st.error.c_str());
    for (const auto& c : st.checks) {
      if (c.relation == "info") std::printf("       %-48s %.6g\n", c.name.c_str(), c.value);
      else
        std::printf("       %-48s %.6g %s %.6g%s\n", c.name.c_str(), c.value, c.relation.c_str(), c.tolerance,
                    c.passed ? "" : "  <-- violated");
    }
  }
  std::printf("config hash %s, output in %s\n", m.config_hash.c_str(), m.out_dir.c_str());
  return m.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for fractional nondivergence operators"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Flags flags;
  int status = 0;
  for (ExperimentKind kind : all_kinds()) {
    auto* sub = app.add_subcommand(std::string(kind_name(kind)), "run a " + std::string(kind_name(kind)) + " experiment");
    sub->add_option("--config", flags.config, "JSON experiment file (defaults apply when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory (default: config output, $FRACLAB_OUT, or ./fraclab-out)");
    sub->add_option("--seed", flags.seed, "override the sampling seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", flags.threads, "worker threads (default: hardware concurrency)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--emit-plots", flags.emit_plots, "write SVG plots next to the report");
    sub->add_flag("--print-config", flags.print_config, "print the effective config and exit");
    sub->callback([&, kind] { status = execute(kind, flags); });
  }

  auto* schema = app.add_subcommand("schema", "describe the parameters of an experiment kind");
  std::string which;
  schema->add_option("kind", which, "experiment kind")->required();
  schema->callback([&] {
    const auto kind = parse_kind(which);
    if (!kind) {
      std::cerr << "unknown kind \"" << which << "\"\n";
      status = 2;
      return;
    }
    std::cout << describe_schema(*kind);
  });

  CLI11_PARSE(app, argc, argv);
  return status;
}
