#include "fraclab/io/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace fraclab::io {

using nlohmann::json;

namespace {

enum class Type { Int, Real, Bool, Choice, IntList };

struct Param {
  const char* key;
  Type type;
  json fallback;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;
  std::vector<std::string> choices{};
  const char* doc = "";
};

constexpr double inf = std::numeric_limits<double>::infinity();

Param integer(const char* key, long long def, double lo, double hi, const char* doc) {
  return {key, Type::Int, def, lo, hi, false, false, {}, doc};
}
Param real(const char* key, double def, double lo, double hi, bool lo_open, bool hi_open, const char* doc) {
  return {key, Type::Real, def, lo, hi, lo_open, hi_open, {}, doc};
}
Param positive(const char* key, double def, const char* doc) { return real(key, def, 0.0, inf, true, false, doc); }
Param flag(const char* key, bool def, const char* doc) { return {key, Type::Bool, def, 0, 0, false, false, {}, doc}; }
Param choice(const char* key, std::vector<std::string> options, const char* doc) {
  json def = options.front();
  return {key, Type::Choice, def, 0, 0, false, false, std::move(options), doc};
}
Param int_list(const char* key, std::vector<long long> def, double lo, double hi, const char* doc) {
  return {key, Type::IntList, def, lo, hi, false, false, {}, doc};
}

const std::vector<Param>& schema(ExperimentKind kind) {
  static const std::vector<Param> geometry{
      integer("samples", 100000, 10, 1e7, "quasi-triangle triples"),
      integer("dimension", 1, 1, 2, "lateral dimension of the sampled points"),
      integer("quotient_samples", 10000, 10, 1e7, "pairs for the quotient bound"),
      integer("scaling_samples", 10000, 10, 1e7, "points for the scaling identities"),
      integer("engulfing_samples", 2000, 10, 1e6, "nested section pairs"),
      integer("doubling_points", 41, 2, 1e4, "radii in the log sweep"),
      positive("radius_min", 1e-3, "smallest sampled radius"),
      positive("radius_max", 10.0, "largest sampled radius"),
      real("kappa", 0.5, 0.0, 1.0, true, true, "inner fraction for mu(S_R) / mu(S_{kappa R})"),
  };
  static const std::vector<Param> fractional{
      choice("problem", {"eigenfunction"}, "sin(kx) on (0, pi)"),
      integer("cells", 512, 8, 1e5, "uniform cells on (0, pi)"),
      int_list("modes", {1, 2, 4}, 1, 1000, "wave numbers k"),
      positive("t_min", 1e-8, "first quadrature node"),
      positive("t_max", 1e4, "last quadrature node"),
      integer("nodes", 96, 8, 1e4, "quadrature nodes"),
      integer("substeps", 8, 1, 1000, "heat steps per quadrature interval"),
      real("tolerance", 1e-3, 0.0, 1.0, true, false, "relative sup error allowed"),
  };
  static const std::vector<Param> extension{
      choice("problem", {"eigenfunction"}, "sin(kx) times the exact profile"),
      integer("k", 1, 1, 64, "wave number"),
      integer("cells", 64, 8, 2048, "cells per direction"),
      choice("bottom", {"neumann", "dirichlet"}, "condition on {z = 0}"),
      flag("semigroup_check", true, "compare slices with the semigroup formula"),
      real("tolerance", 1e-2, 0.0, 1.0, true, false, "sup error allowed"),
  };
  static const std::vector<Param> barrier{
      integer("samples", 10000, 10, 1e7, "annulus samples"),
      positive("R", 0.5, "outer radius, touching {z = 0}"),
      real("rho", 0.25, 0.0, inf, true, false, "inner radius, below R"),
      real("alpha", 0.0, 0.0, 1e8, false, false, "exponent; 0 searches upward from (n+1)/rho"),
      real("eps_start", 0.25, 0.0, 1.0, true, true, "first bump height in the second case"),
  };
  static const std::vector<Param> paraboloids{
      integer("cells", 32, 4, 512, "cells per axis of the (x, h'(z)) grid"),
      positive("opening", 1.0, "opening a of the sliding paraboloids"),
      positive("depth", 1.0, "depth b of the solution b delta_Phi(p0, .)"),
      flag("refine", true, "repeat on the refined grid"),
      real("tolerance", 0.25, 0.0, 1.0, true, false, "relative change of the measure ratio allowed"),
  };
  static const std::vector<Param> harnack{
      integer("family", 20, 1, 1000, "number of positive solutions"),
      integer("cells", 48, 8, 1024, "cells per direction"),
      positive("R", 0.5, "section radius"),
      real("kappa", 0.5, 0.0, 1.0, true, true, "inner fraction"),
      flag("refine", true, "repeat with doubled cells"),
      real("tolerance", 0.2, 0.0, 1.0, true, false, "relative change of C_H allowed"),
  };
  static const std::vector<Param> schauder{
      choice("problem", {"kinked", "harmonic"}, "Neumann datum |x|^alpha, or smooth harmonic data"),
      integer("order", -1, -1, 2, "polynomial order; -1 picks it from alpha + 2s (all orders if harmonic)"),
      real("rho", 0.5, 0.0, 1.0, true, true, "ratio of consecutive scales"),
      integer("depth", 12, 1, 60, "deepest scale index"),
      integer("per_octave", 8, 1, 64, "mesh nodes per halving"),
      positive("x_smallest", 1e-5, "smallest lateral cell"),
      positive("y_smallest", 1e-6, "smallest vertical cell"),
      integer("first", 2, 0, 60, "first scale in the exponent fit"),
      real("tolerance", 0.15, 0.0, 10.0, true, false, "allowed exponent deviation"),
      flag("campanato", true, "run the rescaling iteration as a cross-check"),
  };
  static const std::vector<Param> end_to_end{
      choice("problem", {"eigenfunction", "kinked", "zero"}, "f = sin(kx), |x - x0| sin(x), or 0"),
      integer("k", 1, 1, 64, "wave number of the eigenfunction problem"),
      integer("cells", 256, 16, 1e5, "uniform cells on (0, pi)"),
      real("a", 0.5, 0.0, std::numbers::pi, true, true, "left end of the subdomain"),
      real("b", 2.6, 0.0, std::numbers::pi, true, true, "right end of the subdomain"),
      real("kink", std::numbers::pi / 2, 0.0, std::numbers::pi, true, true, "kink location x0"),
  };
  switch (kind) {
    case ExperimentKind::GeometryCheck: return geometry;
    case ExperimentKind::FractionalApply: return fractional;
    case ExperimentKind::SolveExtension: return extension;
    case ExperimentKind::BarrierCheck: return barrier;
    case ExperimentKind::SlideParaboloids: return paraboloids;
    case ExperimentKind::Harnack: return harnack;
    case ExperimentKind::SchauderDecay: return schauder;
    case ExperimentKind::EndToEnd: return end_to_end;
  }
  return geometry;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string range_text(const Param& p) {
  std::string lo = p.lo == -inf ? "(-inf" : (p.lo_open ? "(" : "[") + fmt(p.lo);
  std::string hi = p.hi == inf ? "inf)" : fmt(p.hi) + (p.hi_open ? ")" : "]");
  return lo + ", " + hi;
}

bool in_range(const Param& p, double v) {
  if (!std::isfinite(v)) return false;
  if (p.lo_open ? !(v > p.lo) : !(v >= p.lo)) return false;
  if (p.hi_open ? !(v < p.hi) : !(v <= p.hi)) return false;
  return true;
}

void check_value(const Param& p, const json& v, const std::string& where, std::vector<std::string>& issues) {
  auto bad_type = [&](const char* want) { issues.push_back(where + ": expected " + want + ", got " + v.dump()); };
  auto range = [&](double x) {
    if (!in_range(p, x)) issues.push_back(where + " = " + fmt(x) + " outside " + range_text(p));
  };
  switch (p.type) {
    case Type::Int:
      if (!v.is_number_integer()) return bad_type("an integer");
      range(v.get<double>());
      return;
    case Type::Real:
      if (!v.is_number()) return bad_type("a number");
      range(v.get<double>());
      return;
    case Type::Bool:
      if (!v.is_boolean()) bad_type("true or false");
      return;
    case Type::Choice: {
      if (!v.is_string()) return bad_type("a string");
      const auto s = v.get<std::string>();
      if (std::find(p.choices.begin(), p.choices.end(), s) == p.choices.end()) {
        std::string list;
        for (const auto& c : p.choices) list += (list.empty() ? "" : ", ") + c;
        issues.push_back(where + " = \"" + s + "\" is not one of {" + list + "}");
      }
      return;
    }
    case Type::IntList:
      if (!v.is_array() || v.empty()) return bad_type("a nonempty list of integers");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!v[i].is_number_integer()) issues.push_back(at + ": expected an integer, got " + v[i].dump());
        else if (!in_range(p, v[i].get<double>()))
          issues.push_back(at + " = " + fmt(v[i].get<double>()) + " outside " + range_text(p));
      }
      return;
  }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void reject_unknown(const json& obj, const std::vector<std::string>& known, const std::string& prefix,
                    std::vector<std::string>& issues) {
  for (const auto& [key, value] : obj.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      issues.push_back(prefix + key + ": unknown key");
}

// Consistency checks spanning several keys.
void cross_check(const ExperimentConfig& c, std::vector<std::string>& issues) {
  const json& p = c.params;
  switch (c.kind) {
    case ExperimentKind::GeometryCheck:
      if (p["radius_min"].get<double>() >= p["radius_max"].get<double>())
        issues.push_back("params.radius_min must be below params.radius_max");
      break;
    case ExperimentKind::FractionalApply:
      if (p["t_min"].get<double>() >= p["t_max"].get<double>())
        issues.push_back("params.t_min must be below params.t_max");
      break;
    case ExperimentKind::BarrierCheck:
      if (p["rho"].get<double>() >= p["R"].get<double>()) issues.push_back("params.rho must be below params.R");
      break;
    case ExperimentKind::SchauderDecay: {
      const int order = p["order"].get<int>();
      if (p["problem"] == "kinked" && order < 0) {
        const double e = c.setup.alpha + 2.0 * c.setup.s;
        if (e == 1.0 || e == 2.0 || e >= 3.0)
          issues.push_back("setup: alpha + 2s = " + fmt(e) + " must avoid 1 and 2 and stay below 3");
      }
      if (p["first"].get<int>() > p["depth"].get<int>()) issues.push_back("params.first must not exceed params.depth");
      break;
    }
    case ExperimentKind::EndToEnd: {
      if (p["a"].get<double>() >= p["b"].get<double>()) issues.push_back("params.a must be below params.b");
      const double e = c.setup.alpha + 2.0 * c.setup.s;
      if (e == 1.0 || e >= 2.0) issues.push_back("setup: alpha + 2s = " + fmt(e) + " must avoid 1 and stay below 2");
      break;
    }
    default:
      break;
  }
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::GeometryCheck: return "geometry-check";
    case ExperimentKind::FractionalApply: return "fractional-apply";
    case ExperimentKind::SolveExtension: return "solve-extension";
    case ExperimentKind::BarrierCheck: return "barrier-check";
    case ExperimentKind::SlideParaboloids: return "slide-paraboloids";
    case ExperimentKind::Harnack: return "harnack";
    case ExperimentKind::SchauderDecay: return "schauder-decay";
    case ExperimentKind::EndToEnd: return "end-to-end";
  }
  return "unknown";
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds{
      ExperimentKind::GeometryCheck, ExperimentKind::FractionalApply, ExperimentKind::SolveExtension,
      ExperimentKind::BarrierCheck,  ExperimentKind::SlideParaboloids, ExperimentKind::Harnack,
      ExperimentKind::SchauderDecay, ExperimentKind::EndToEnd};
  return kinds;
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (auto k : all_kinds())
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid config:";
        for (const auto& i : issues) msg += "\n  " + i;
        return msg;
      }()),
      issues_(std::move(issues)) {}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  for (const auto& p : schema(kind)) c.params[p.key] = p.fallback;
  return c;
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << source << ":" << line << ":" << col << ": JSON parse error: " << e.what();
    throw ConfigError({msg.str()});
  }
  std::vector<std::string> issues;
  if (!doc.is_object()) throw ConfigError({std::string(source) + ": top level must be an object"});

  reject_unknown(doc, {"schema_version", "kind", "setup", "seed", "output", "params"}, "", issues);

  if (doc.contains("schema_version")) {
    const auto& v = doc["schema_version"];
    if (!v.is_number_integer() || v.get<long long>() != kSchemaVersion)
      issues.push_back("schema_version: only version " + std::to_string(kSchemaVersion) + " is understood, got " +
                       v.dump());
  }
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    issues.push_back("kind: required string naming the experiment");
    throw ConfigError(issues);
  }
  const auto kind = parse_kind(doc["kind"].get<std::string>());
  if (!kind) {
    std::string list;
    for (auto k : all_kinds()) list += (list.empty() ? "" : ", ") + std::string(kind_name(k));
    issues.push_back("kind = \"" + doc["kind"].get<std::string>() + "\" is not one of {" + list + "}");
    throw ConfigError(issues);
  }
  ExperimentConfig c = default_config(*kind);

  if (doc.contains("setup")) {
    const auto& s = doc["setup"];
    if (!s.is_object()) {
      issues.push_back("setup: expected an object");
    } else {
      reject_unknown(s, {"s", "lambda", "Lambda", "alpha"}, "setup.", issues);
      auto read = [&](const char* key, double& slot) {
        if (!s.contains(key)) return;
        if (!s[key].is_number()) issues.push_back(std::string("setup.") + key + ": expected a number, got " + s[key].dump());
        else slot = s[key].get<double>();
      };
      read("s", c.setup.s);
      read("lambda", c.setup.lambda);
      read("Lambda", c.setup.Lambda);
      read("alpha", c.setup.alpha);
    }
  }
  if (!(c.setup.s > 0.0 && c.setup.s < 1.0)) issues.push_back("setup.s = " + fmt(c.setup.s) + " outside (0, 1)");
  if (!(c.setup.lambda > 0.0)) issues.push_back("setup.lambda = " + fmt(c.setup.lambda) + " must be positive");
  if (!(c.setup.Lambda >= c.setup.lambda))
    issues.push_back("setup.Lambda = " + fmt(c.setup.Lambda) + " must be at least setup.lambda");
  if (!(c.setup.alpha > 0.0 && c.setup.alpha < 1.0))
    issues.push_back("setup.alpha = " + fmt(c.setup.alpha) + " outside (0, 1)");

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) issues.push_back("seed: expected a nonnegative integer, got " + doc["seed"].dump());
    else c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) issues.push_back("output: expected a string");
    else c.output = doc["output"].get<std::string>();
  }
  if (doc.contains("params")) {
    const auto& p = doc["params"];
    if (!p.is_object()) {
      issues.push_back("params: expected an object");
    } else {
      std::vector<std::string> known;
      for (const auto& spec : schema(*kind)) known.emplace_back(spec.key);
      reject_unknown(p, known, "params.", issues);
      for (const auto& spec : schema(*kind)) {
        if (!p.contains(spec.key)) continue;
        const std::size_t before = issues.size();
        check_value(spec, p[spec.key], std::string("params.") + spec.key, issues);
        if (issues.size() != before) continue;
        // Reals are stored as reals even when written as 1, so 1 and 1.0 hash alike.
        c.params[spec.key] = spec.type == Type::Real ? json(p[spec.key].get<double>()) : p[spec.key];
      }
    }
  }
  if (issues.empty()) cross_check(c, issues);
  if (!issues.empty()) throw ConfigError(issues);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["kind"] = std::string(kind_name(c.kind));
  j["setup"] = {{"s", c.setup.s}, {"lambda", c.setup.lambda}, {"Lambda", c.setup.Lambda}, {"alpha", c.setup.alpha}};
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["params"] = c.params;
  return j;
}

std::string emit_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

std::string canonicalize(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("output");
  return j.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& c) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonicalize(c));
  return os.str();
}

std::string describe_schema(ExperimentKind kind) {
  std::ostringstream os;
  os << kind_name(kind) << " params:\n";
  for (const auto& p : schema(kind)) {
    os << "  " << std::left << std::setw(18) << p.key << " default " << std::setw(14) << p.fallback.dump();
    if (p.type == Type::Int || p.type == Type::Real || p.type == Type::IntList) os << " range " << range_text(p);
    if (p.type == Type::Choice) {
      os << " one of";
      for (const auto& ch : p.choices) os << " " << ch;
    }
    os << "  " << p.doc << "\n";
  }
  return os.str();
}

}  // namespace fraclab::io
