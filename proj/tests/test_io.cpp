#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fraclab/io/config.hpp"
#include "fraclab/io/report_json.hpp"
#include "fraclab/io/run.hpp"
#include "fraclab/io/svg.hpp"
#include "fraclab/problems.hpp"

using namespace fraclab;
using namespace fraclab::io;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const char* root = std::getenv("FRACLAB_TEST_TMP");
  fs::path p = fs::path(root ? root : "fraclab-test-tmp") / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small(ExperimentKind kind, json params) {
  auto c = default_config(kind);
  for (auto& [k, v] : params.items()) c.params[k] = v;
  return c;
}

}  // namespace

TEST_CASE("defaults and names") {
  for (auto kind : all_kinds()) {
    CHECK(parse_kind(kind_name(kind)) == kind);
    const auto c = default_config(kind);
    CHECK(c.kind == kind);
    CHECK(c.schema_version == kSchemaVersion);
    CHECK_FALSE(describe_schema(kind).empty());
  }
  CHECK_FALSE(parse_kind("nonsense"));
  CHECK(default_config(ExperimentKind::Harnack).params.at("kappa") == 0.5);
  CHECK(default_config(ExperimentKind::SchauderDecay).params.at("tolerance") == 0.15);
}

TEST_CASE("strict parsing reports every issue") {
  try {
    (void)parse_config(R"({"kind": "harnack", "setup": {"s": 1.2}, "params": {"kapa": 1, "cells": "x"}})");
    FAIL("accepted an invalid config");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() == 3);
    const std::string all = e.what();
    CHECK(all.find("setup.s") != std::string::npos);
    CHECK(all.find("params.kapa") != std::string::npos);
    CHECK(all.find("params.cells") != std::string::npos);
  }
  try {
    (void)parse_config("{\"kind\": \"harnack\",\n \"setup\": {\"s\": 0.5,}}", "broken.json");
    FAIL("accepted malformed JSON");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("broken.json:2:") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse_config(R"({"kind": "nope"})"), ConfigError);
  CHECK_THROWS_AS((void)parse_config(R"({"kind": "harnack", "schema_version": 99})"), ConfigError);
  CHECK_THROWS_AS((void)parse_config(R"({"kind": "harnack", "extra": 1})"), ConfigError);
  CHECK_THROWS_AS((void)parse_config(R"({"kind": "barrier-check", "params": {"R": 0.5, "rho": 0.6}})"), ConfigError);
  CHECK_THROWS_AS((void)load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("emit and parse round-trip; the hash ignores output") {
  for (auto kind : all_kinds()) {
    auto c = default_config(kind);
    c.setup.s = 0.3;
    c.seed = 99;
    const auto back = parse_config(emit_config(c));
    CHECK(canonicalize(back) == canonicalize(c));
    CHECK(config_hash(back) == config_hash(c));
    auto moved = c;
    moved.output = "/somewhere/else";
    CHECK(config_hash(moved) == config_hash(c));
    auto other = c;
    other.seed = 100;
    CHECK(config_hash(other) != config_hash(c));
    CHECK(config_hash(c).size() == 16);
  }
  // Key order in the file does not matter.
  const auto a = parse_config(R"({"kind": "harnack", "seed": 5, "setup": {"s": 0.25}})");
  const auto b = parse_config(R"({"setup": {"s": 0.25}, "seed": 5, "kind": "harnack"})");
  CHECK(config_hash(a) == config_hash(b));
  // Published FNV-1a test vectors.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("geometry run: outputs and determinism") {
  const auto c = small(ExperimentKind::GeometryCheck,
                       {{"samples", 1000}, {"quotient_samples", 200}, {"scaling_samples", 200},
                        {"engulfing_samples", 100}, {"doubling_points", 9}});
  RunOptions o1, o2;
  o1.out_dir = scratch("geometry-1").string();
  o2.out_dir = scratch("geometry-2").string();
  o2.threads = 3;
  const auto m1 = run(c, o1);
  const auto m2 = run(c, o2);
  CHECK(m1.passed());
  CHECK(m1.config_hash == config_hash(c));
  CHECK(fs::exists(fs::path(o1.out_dir) / "manifest.json"));
  const auto r1 = slurp(fs::path(o1.out_dir) / "report.json");
  CHECK(r1 == slurp(fs::path(o2.out_dir) / "report.json"));
  const auto report = json::parse(r1);
  CHECK(report.at("config_hash") == m1.config_hash);
  CHECK(report.at("tool_version") == kToolVersion);
  CHECK(report.at("stages").size() == m1.stages.size());
  CHECK(r1.find("started") == std::string::npos);
  const auto manifest = json::parse(slurp(fs::path(o1.out_dir) / "manifest.json"));
  CHECK(manifest.contains("started"));
  CHECK(manifest.at("outputs").size() == m1.outputs.size());

  // A different seed changes the sampled numbers and the hash.
  RunOptions o3 = o1;
  o3.out_dir = scratch("geometry-3").string();
  o3.seed = 1;
  const auto m3 = run(c, o3);
  CHECK(m3.config_hash != m1.config_hash);
}

TEST_CASE("harnack run writes identical CSV and SVG bytes") {
  const auto c = small(ExperimentKind::Harnack, {{"family", 4}, {"cells", 16}});
  RunOptions o1, o2;
  o1.out_dir = scratch("harnack-1").string();
  o2.out_dir = scratch("harnack-2").string();
  o1.emit_plots = o2.emit_plots = true;
  o2.threads = 4;
  const auto m1 = run(c, o1);
  (void)run(c, o2);
  for (const char* f : {"report.json", "harnack.csv", "harnack.svg"}) {
    CAPTURE(f);
    CHECK(fs::exists(fs::path(o1.out_dir) / f));
    CHECK(slurp(fs::path(o1.out_dir) / f) == slurp(fs::path(o2.out_dir) / f));
  }
  const auto csv = slurp(fs::path(o1.out_dir) / "harnack.csv");
  CHECK(csv.rfind("fixture,R,kappa,sup,inf,data_f,data_F,Q,nodes\n", 0) == 0);
  const auto svg = slurp(fs::path(o1.out_dir) / "harnack.svg");
  CHECK(svg.find("config-hash: " + m1.config_hash) != std::string::npos);
  for (const auto& out : m1.outputs) CHECK(out.fnv1a == [&] {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(slurp(fs::path(o1.out_dir) / out.path))));
    return std::string(buf);
  }());
}

TEST_CASE("schauder run") {
  auto c = small(ExperimentKind::SchauderDecay, {{"per_octave", 4}, {"depth", 8}});
  c.setup.s = 0.5;
  c.setup.alpha = 0.3;
  RunOptions o;
  o.out_dir = scratch("schauder").string();
  o.emit_plots = true;
  const auto m = run(c, o);
  CHECK(m.stages.front().name == "solve");
  CHECK(fs::exists(fs::path(o.out_dir) / "decay.csv"));
  CHECK(fs::exists(fs::path(o.out_dir) / "solution.svg"));
  CHECK(fs::exists(fs::path(o.out_dir) / "decay-order-1.svg"));
  const auto csv = slurp(fs::path(o.out_dir) / "decay.csv");
  CHECK(csv.rfind("j,r,nodes,error,used,c,b,A,d\n", 0) == 0);
}

TEST_CASE("plots") {
  const PlotMeta meta{"empty ladder", "0123456789abcdef"};
  const auto empty = decay_svg(DecayReport{}, 1.0, meta);
  CHECK(empty.find("no data") != std::string::npos);
  CHECK(empty.find("<!-- config-hash: 0123456789abcdef -->") != std::string::npos);
  CHECK(empty.find("<!-- title: empty ladder -->") != std::string::npos);
  CHECK(empty.find("<svg") != std::string::npos);
  CHECK(sweep_svg({}, meta).find("no data") != std::string::npos);
  const auto sweep = sweep_svg({{"48", {1.1, 1.3, 1.2}}, {"96", {1.1, 1.31, 1.2}}}, meta);
  CHECK(sweep.find("no data") == std::string::npos);
  CHECK(sweep.find("96") != std::string::npos);

  const auto st = solve_extension(eigen_problem(0.5, 1.0, BottomCondition::Neumann), eigen_mesh(0.5, 16));
  const auto heat = heatmap_svg(st, meta);
  CHECK(heat.find("config-hash") != std::string::npos);
  CHECK(heat.size() < 2'000'000);
  // Colour bar plus raster, both as rects.
  std::size_t rects = 0;
  for (std::size_t p = heat.find("<rect"); p != std::string::npos; p = heat.find("<rect", p + 1)) ++rects;
  CHECK(rects > 64);

  const auto path = scratch("plots") / "p.svg";
  fs::create_directories(path.parent_path());
  CHECK(emit_plot(path.string(), heat) == heat.size());
  CHECK(slurp(path) == heat);
}

TEST_CASE("report serialisation writes non-finite values as null") {
  DecayReport r;
  r.exponent = std::numeric_limits<double>::quiet_NaN();
  const auto j = to_json(r);
  CHECK(j.at("exponent").is_null());
  CHECK(decay_csv(r) == "j,r,nodes,error,used,c,b,A,d\n");
}
