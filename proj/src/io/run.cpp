#include "fraclab/io/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "fraclab/barriers.hpp"
#include "fraclab/extension.hpp"
#include "fraclab/geometry_checks.hpp"
#include "fraclab/io/report_json.hpp"
#include "fraclab/io/svg.hpp"
#include "fraclab/paraboloids.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/problems.hpp"
#include "fraclab/regularity.hpp"
#include "fraclab/semigroup.hpp"

namespace fraclab::io {

namespace fs = std::filesystem;
using nlohmann::json;

bool Stage::passed() const {
  if (!error.empty()) return false;
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

bool RunManifest::passed() const {
  for (const auto& s : stages)
    if (!s.passed()) return false;
  return true;
}

std::string default_output_root() {
  if (const char* env = std::getenv("FRACLAB_OUT"); env && *env) return env;
  return "fraclab-out";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

Check make_check(std::string name, double value, std::string relation, double tolerance) {
  Check c{std::move(name), value, tolerance, std::move(relation), true};
  if (c.relation == "info") return c;
  if (!std::isfinite(value) && c.relation != "<" && c.relation != "<=") c.passed = false;
  else if (std::isnan(value)) c.passed = false;
  else if (c.relation == "<=") c.passed = value <= tolerance;
  else if (c.relation == ">=") c.passed = value >= tolerance;
  else if (c.relation == "<") c.passed = value < tolerance;
  else if (c.relation == ">") c.passed = value > tolerance;
  else if (c.relation == "==") c.passed = value == tolerance;
  else c.passed = false;
  return c;
}

json check_json(const Check& c) {
  return {{"name", c.name}, {"value", num(c.value)}, {"tolerance", num(c.tolerance)}, {"relation", c.relation},
          {"passed", c.passed}};
}

json stage_json(const Stage& s) {
  json checks = json::array();
  for (const auto& c : s.checks) checks.push_back(check_json(c));
  json j{{"name", s.name}, {"residual", num(s.residual)}, {"checks", checks}, {"passed", s.passed()}};
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

// State shared by the stages of one run.
class Run {
 public:
  Run(const ExperimentConfig& c, const RunOptions& o, fs::path dir, std::string hash)
      : config(c), options(o), dir_(std::move(dir)), hash_(std::move(hash)) {}

  const ExperimentConfig& config;
  const RunOptions& options;
  json data = json::object();  // report payload per stage
  std::vector<Stage> stages;
  std::vector<OutputFile> outputs;

  [[nodiscard]] const json& params() const { return config.params; }
  [[nodiscard]] double real(const char* k) const { return config.params.at(k).get<double>(); }
  [[nodiscard]] long long integer(const char* k) const { return config.params.at(k).get<long long>(); }
  [[nodiscard]] std::size_t count(const char* k) const { return static_cast<std::size_t>(integer(k)); }
  [[nodiscard]] bool flag(const char* k) const { return config.params.at(k).get<bool>(); }
  [[nodiscard]] std::string text(const char* k) const { return config.params.at(k).get<std::string>(); }
  [[nodiscard]] std::uint64_t seed() const { return options.seed.value_or(config.seed); }
  [[nodiscard]] PlotMeta meta(std::string title) const { return {std::move(title), hash_}; }

  // Runs `body` as a named stage; exceptions become a failed stage.
  void stage(const std::string& name, const std::function<void(Stage&, json&)>& body) {
    Stage st;
    st.name = name;
    json payload = json::object();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(st, payload);
    } catch (const std::exception& e) {
      st.error = e.what();
    }
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    data[name] = payload;
    stages.push_back(std::move(st));
  }

  void write(const std::string& name, const std::string& bytes) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << bytes;
    out.close();
    outputs.push_back({name, bytes.size(), hex64(fnv1a64(bytes))});
  }

  void write_grid(const std::string& name, const BinaryGrid& grid) {
    const fs::path p = dir_ / name;
    write_binary_grid(p.string(), grid);
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    outputs.push_back({name, bytes.size(), hex64(fnv1a64(bytes))});
  }

  void plot(const std::string& name, const std::string& svg) {
    if (options.emit_plots) write(name, svg);
  }

 private:
  fs::path dir_;
  std::string hash_;
};

BinaryGrid grid_of(const ExtensionState& st) {
  BinaryGrid g;
  g.axes = {st.x.axis(0), st.z};
  g.values = st.U;
  return g;
}

// ---------------------------------------------------------------- geometry

void geometry_pipeline(Run& run) {
  const double s = run.config.setup.s;
  const MAGeometry g(s);
  SamplingSpec spec;
  spec.radius_min = run.real("radius_min");
  spec.radius_max = run.real("radius_max");
  spec.seed = run.seed();
  const int dim = static_cast<int>(run.integer("dimension"));

  run.stage("constants", [&](Stage& st, json& out) {
    out = {{"s", s}, {"q", g.q()}, {"c", g.c()}, {"ds", ds_constant(s)}};
    st.checks.push_back(make_check("h(q) - 1", std::abs(g.h(g.q()) - 1.0), "<=", 1e-13));
  });
  run.stage("quasi-triangle", [&](Stage& st, json& out) {
    const auto r = quasi_triangle_check(g, dim, run.count("samples"), spec);
    out = to_json(r);
    st.checks.push_back(make_check("K_hat", r.K_hat, "<", kInf));
    st.checks.push_back(make_check("K_hat >= 1", r.K_hat, ">=", 1.0));
  });
  run.stage("scaling", [&](Stage& st, json& out) {
    const auto r = scaling_check(g, dim, run.count("scaling_samples"), spec);
    out = to_json(r);
    st.checks.push_back(make_check("relative h error", r.max_h_error, "<=", 1e-13));
    st.checks.push_back(make_check("relative h' error", r.max_dh_error, "<=", 1e-13));
    st.checks.push_back(make_check("membership mismatches", static_cast<double>(r.membership_mismatches), "==", 0.0));
  });
  run.stage("doubling", [&](Stage& st, json& out) {
    const std::size_t n = run.count("doubling_points");
    const double kappa = run.real("kappa");
    std::vector<DoublingSection> sections;
    double kmin = kInf, kmax = 0.0;
    for (double z0 : {0.0, 0.25, 1.0, 4.0}) {
      for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        const double R = spec.radius_min * std::pow(spec.radius_max / spec.radius_min, t);
        sections.push_back({z0, R});
        const double ratio = g.mu_h(g.section(z0, R)) / g.mu_h(g.section(z0, kappa * R));
        kmin = std::min(kmin, ratio);
        kmax = std::max(kmax, ratio);
      }
    }
    const auto r = doubling_check(g, sections);
    out = to_json(r);
    out["kappa"] = kappa;
    out["measure_ratio_min"] = num(kmin);
    out["measure_ratio_max"] = num(kmax);
    st.checks.push_back(make_check("min |S| mu / R", r.min_ratio, ">", 0.0));
    st.checks.push_back(make_check("max |S| mu / R", r.max_ratio, "<", kInf));
    st.checks.push_back(make_check("max mu(S_R) / mu(S_kR)", kmax, "<", kInf));
    st.checks.push_back(make_check("min mu(S_R) / mu(S_kR)", kmin, ">=", 1.0));
  });
  run.stage("quotient", [&](Stage& st, json& out) {
    const auto r = quotient_check(g, run.count("quotient_samples"), spec);
    out = to_json(r);
    // The lower bound 1 is a property of the small-s profiles only.
    out["asserted"] = s <= 0.5;
    st.checks.push_back(make_check("min quotient", r.min_quotient, s <= 0.5 ? ">=" : "info", 1.0 - 1e-10));
  });
  run.stage("engulfing", [&](Stage& st, json& out) {
    const auto r = engulfing_check(g, run.count("engulfing_samples"), spec);
    out = to_json(r);
    st.checks.push_back(make_check("x-component C_hat", r.x.C_hat, "<", kInf));
    st.checks.push_back(make_check("z-component C_hat", r.z.C_hat, "<", kInf));
    st.checks.push_back(make_check("z-component p_hat", r.z.p_hat, "info", 0.0));
  });
  run.stage("a-infinity", [&](Stage& st, json& out) {
    const auto r = a_infinity_check(g, 200, 8, spec);
    out = {{"length_fraction", r.length_fraction},
           {"worst_mass_fraction", r.worst_mass_fraction},
           {"decay_exponent", num(r.decay_exponent)},
           {"monotone", r.monotone}};
    st.checks.push_back(make_check("decay exponent", r.decay_exponent, ">", 0.0));
  });
}

// ---------------------------------------------------------------- fractional

QuadratureSpec quadrature_of(const Run& run) {
  QuadratureSpec q;
  q.t_min = run.real("t_min");
  q.t_max = run.real("t_max");
  q.nodes = run.count("nodes");
  q.substeps = run.count("substeps");
  return q;
}

void fractional_pipeline(Run& run) {
  const double s = run.config.setup.s;
  const QuadratureSpec quad = quadrature_of(run);
  run.stage("scalar", [&](Stage& st, json& out) {
    out = json::array();
    for (double lambda : {1.0, 4.0, 9.0}) {
      const double v = scalar_fractional(lambda, s, quad);
      const double rel = std::abs(v / std::pow(lambda, s) - 1.0);
      const double inv = std::abs(scalar_inverse(lambda, s, quad) * std::pow(lambda, s) - 1.0);
      out.push_back({{"lambda", lambda}, {"value", v}, {"relative_error", rel}, {"inverse_relative_error", inv}});
      st.checks.push_back(make_check("lambda=" + std::to_string(static_cast<int>(lambda)) + " relative error", rel,
                                     "<=", 1e-6));
    }
  });
  run.stage("eigenfunctions", [&](Stage& st, json& out) {
    const std::size_t cells = run.count("cells");
    const TensorMesh mesh({uniform_axis(0.0, std::numbers::pi, cells)});
    const SemigroupStepper L(mesh, CoefficientField::identity(1));
    out = json::array();
    std::string csv = "k,x,value,exact\n";
    for (const auto& kj : run.params().at("modes")) {
      const double k = kj.get<double>();
      const auto u = GridFunction::sample_dirichlet(mesh, [k](double x, double) { return std::sin(k * x); });
      const auto r = fractional_apply(L, u, s, quad);
      const double scale = std::pow(k, 2.0 * s);
      double err = 0.0;
      for (std::size_t i = 0; i < mesh.size(); ++i) err = std::max(err, std::abs(r.value[i] - scale * u[i]));
      err /= scale;
      out.push_back({{"k", k}, {"relative_sup_error", err}, {"upper_tail", r.upper_tail}, {"lower_tail", r.lower_tail}});
      st.checks.push_back(make_check("k=" + std::to_string(static_cast<int>(k)) + " relative sup error", err, "<=",
                                     run.real("tolerance")));
      char line[128];
      for (std::size_t i = 0; i < mesh.size(); ++i) {
        std::snprintf(line, sizeof line, "%g,%.17g,%.17g,%.17g\n", k, mesh.axis(0)[i], r.value[i], scale * u[i]);
        csv += line;
      }
    }
    run.write("fractional.csv", csv);
  });
}

// ---------------------------------------------------------------- extension

void extension_pipeline(Run& run) {
  const double s = run.config.setup.s;
  const double k = static_cast<double>(run.integer("k"));
  const std::size_t cells = run.count("cells");
  const auto bottom = run.text("bottom") == "dirichlet" ? BottomCondition::Dirichlet : BottomCondition::Neumann;
  const double tol = run.real("tolerance");
  ExtensionState state;
  run.stage("solve", [&](Stage& st, json& out) {
    state = solve_extension(eigen_problem(s, k, bottom), eigen_mesh(s, cells));
    st.residual = std::max(state.interior_residual, state.neumann_residual);
    double err = 0.0, trace_err = 0.0, flux_err = 0.0;
    const Axis& X = state.x.axis(0);
    const double flux = -ds_constant(s) * std::pow(k, 2.0 * s);
    for (std::size_t i = 0; i < X.size(); ++i) {
      for (std::size_t j = 0; j < state.nz(); ++j)
        err = std::max(err, std::abs(state.at(i, j) - std::sin(k * X[i]) * eigen_profile(s, k, state.y[j])));
      trace_err = std::max(trace_err, std::abs(state.trace[i] - std::sin(k * X[i])));
      if (i > 0 && i + 1 < X.size()) flux_err = std::max(flux_err, std::abs(state.flux[i] - flux * std::sin(k * X[i])));
    }
    out = {{"scheme", state.scheme},
           {"monotone", state.monotone},
           {"grading", state.grading},
           {"sup_error", err},
           {"trace_error", trace_err},
           {"flux_relative_error", flux_err / std::abs(flux)},
           {"interior_residual", num(state.interior_residual)},
           {"neumann_residual", num(state.neumann_residual)}};
    st.checks.push_back(make_check("sup error against the exact extension", err, "<=", tol));
    if (bottom == BottomCondition::Neumann) st.checks.push_back(make_check("trace error", trace_err, "<=", tol));
    else st.checks.push_back(make_check("relative flux error", flux_err / std::abs(flux), "info", 0.0));
    run.write_grid("extension.frlgrid", grid_of(state));
    run.plot("extension.svg", heatmap_svg(state, run.meta("extension solution, k = " + std::to_string(int(k)))));
  });
  if (run.flag("semigroup_check")) {
    run.stage("semigroup", [&](Stage& st, json& out) {
      if (state.U.empty()) throw std::runtime_error("no solution to compare");
      const TensorMesh mesh({uniform_axis(0.0, std::numbers::pi, cells)});
      const SemigroupStepper L(mesh, CoefficientField::identity(1));
      const auto u = GridFunction::sample_dirichlet(mesh, [k](double x, double) { return std::sin(k * x); });
      const std::vector<double> zs{transform_to_z(0.25, s), transform_to_z(0.5, s), transform_to_z(1.0, s),
                                   transform_to_z(2.0, s)};
      const auto slices = extension_via_semigroup(L, u, s, zs);
      out = json::array();
      double worst = 0.0;
      for (std::size_t m = 0; m < zs.size(); ++m) {
        double d = 0.0;
        for (std::size_t i = 0; i < mesh.size(); ++i)
          d = std::max(d, std::abs(slices.values[m][i] - state.interpolate(mesh.axis(0)[i], 0.0, zs[m])));
        worst = std::max(worst, d);
        out.push_back({{"z", zs[m]}, {"sup_difference", d}});
      }
      st.checks.push_back(make_check("sup difference to the semigroup formula", worst, "<=", tol));
    });
  }
}

// ---------------------------------------------------------------- barriers

void barrier_pipeline(Run& run) {
  const double s = run.config.setup.s;
  const MAGeometry g(s);
  BarrierSpec spec;
  spec.x0 = {0.0};
  spec.R = run.real("R");
  spec.rho = run.real("rho");
  spec.z0 = touching_center(g, spec.R);
  const std::size_t samples = run.count("samples");
  const double alpha = run.real("alpha");
  run.stage(s <= 0.5 ? "case-one" : "case-two", [&](Stage& st, json& out) {
    BarrierVerification v;
    out = {{"z0", spec.z0}, {"R", spec.R}, {"rho", spec.rho}};
    if (s <= 0.5) {
      std::size_t tried = 0;
      // The admissible range starts just above (n + 1) / rho.
      spec.alpha = alpha > 0.0 ? alpha : 1.125 * 2.0 / spec.rho;
      for (;;) {
        ++tried;
        v = CaseOneBarrier(g, spec).verify(samples, run.seed());
        if (v.passed || alpha > 0.0 || tried >= 24) break;
        spec.alpha *= 2.0;
      }
      out["alpha"] = spec.alpha;
      out["tried"] = tried;
    } else if (alpha > 0.0) {
      spec.alpha = alpha;
      const CaseTwoBarrier b(g, spec, run.real("eps_start"));
      v = b.verify(samples, run.seed());
      out["alpha"] = alpha;
      out["eps"] = run.real("eps_start");
      out["profile"] = to_json(b.profile());
    } else {
      const auto r = search_case_two(g, spec, samples, run.seed(), run.real("eps_start"));
      v = r.verification;
      out["found"] = r.found;
      out["alpha"] = r.alpha;
      out["eps"] = r.eps;
      out["tried"] = r.tried;
      if (r.found) {
        spec.alpha = r.alpha;
        out["profile"] = to_json(CaseTwoBarrier(g, spec, r.eps).profile());
      }
    }
    out["verification"] = to_json(v);
    st.checks.push_back(make_check("min bracket on the annulus", v.min_bracket, ">", 0.0));
    st.checks.push_back(make_check("d_z phi at the touching point", v.dz_at_trace, ">", 0.0));
    st.checks.push_back(make_check("min phi on the inner boundary", v.inner_min, ">", 0.0));
    st.checks.push_back(make_check("max |phi| on the outer boundary", std::abs(v.outer_max), "<=", 1e-12));
    st.checks.push_back(make_check("max phi on the inner boundary", v.inner_max, "info", 0.0));
  });
}

// ---------------------------------------------------------------- paraboloids

void paraboloid_pipeline(Run& run) {
  const MAGeometry g(run.config.setup.s);
  const double a = run.real("opening"), depth = run.real("depth");
  std::vector<std::size_t> grids{run.count("cells")};
  if (run.flag("refine")) grids.push_back(2 * grids.front());
  std::vector<double> ratios;
  for (std::size_t cells : grids) {
    run.stage("slide-" + std::to_string(cells), [&](Stage& st, json& out) {
      const auto f = sliding_fixture(g, cells, depth);
      const auto r = slide_paraboloids(g, f.U, f.vertices, a);
      out = to_json(r);
      ratios.push_back(r.ratio);
      const double scale = f.U.max_abs() + 1.0;
      st.checks.push_back(make_check("min U - P over all vertices", r.min_gap / scale, ">=", -1e-12));
      st.checks.push_back(make_check("max |U - P| at contacts", r.max_contact_gap / scale, "<=", 1e-12));
      st.checks.push_back(make_check("mu(A)", r.mu_A, ">", 0.0));
    });
  }
  if (ratios.size() == 2) {
    run.stage("refinement", [&](Stage& st, json& out) {
      const double change = std::abs(ratios[1] - ratios[0]) / ratios[0];
      out = {{"ratios", ratios}, {"relative_change", change}};
      st.checks.push_back(make_check("relative change of mu(A)/mu(B)", change, "<=", run.real("tolerance")));
    });
  }
  run.stage("inf-convolution", [&](Stage& st, json& out) {
    // Lipschitz fixture |x - 0.3| + sin(3z)/2 with |grad| <= sqrt(1 + 9/4).
    const std::size_t n = run.count("cells");
    const TensorMesh mesh({uniform_axis(-1.0, 1.0, n), uniform_axis(-1.0, 1.0, n)});
    const auto U = GridFunction::sample(mesh, [](double x, double z) { return std::abs(x - 0.3) + 0.5 * std::sin(3.0 * z); });
    const double L2 = 1.0 + 9.0 / 4.0;
    out = json::array();
    std::vector<double> previous;
    double worst_order = -kInf, worst_gap = -kInf, worst_semi = -kInf, worst_mono = -kInf;
    for (double eps : {0.4, 0.2, 0.1, 0.05}) {
      const auto c = inf_convolution(U, eps);
      double above = -kInf, gap = 0.0;
      for (std::size_t i = 0; i < U.size(); ++i) {
        above = std::max(above, c.value[i] - U[i]);
        gap = std::max(gap, std::abs(c.value[i] - U[i]));
      }
      // Smaller eps gives larger values.
      if (!previous.empty())
        for (std::size_t i = 0; i < U.size(); ++i) worst_mono = std::max(worst_mono, previous[i] - c.value[i]);
      previous = c.value.values();
      const double semi = max_second_difference(c.value);
      worst_order = std::max(worst_order, above);
      worst_gap = std::max(worst_gap, gap - L2 * eps / 4.0);
      worst_semi = std::max(worst_semi, semi - 2.0 / eps);
      out.push_back({{"eps", eps}, {"max_above", above}, {"sup_gap", gap}, {"gap_bound", L2 * eps / 4.0},
                     {"max_second_difference", semi}, {"semiconcavity_bound", 2.0 / eps}});
    }
    st.checks.push_back(make_check("max U_eps - U", worst_order, "<=", 0.0));
    st.checks.push_back(make_check("max of U_eps' - U_eps for eps' > eps", worst_mono, "<=", 0.0));
    st.checks.push_back(make_check("sup gap minus L^2 eps / 4", worst_gap, "<=", 1e-12));
    st.checks.push_back(make_check("second difference minus 2 / eps", worst_semi, "<=", 1e-9));
  });
}

// ---------------------------------------------------------------- harnack

void harnack_pipeline(Run& run) {
  const auto family = harnack_family(run.count("family"), run.seed());
  const double R = run.real("R"), kappa = run.real("kappa");
  std::vector<std::size_t> grids{run.count("cells")};
  if (run.flag("refine")) grids.push_back(2 * grids.front());
  std::vector<SweepSeries> series;
  std::vector<double> C;
  std::string csv;
  for (std::size_t cells : grids) {
    run.stage("sweep-" + std::to_string(cells), [&](Stage& st, json& out) {
      const auto sweep = harnack_sweep(family, cells, R, kappa);
      out = to_json(sweep);
      C.push_back(sweep.C_hat);
      SweepSeries ser{std::to_string(cells) + " cells", {}};
      double qmin = kInf;
      for (const auto& r : sweep.reports) {
        ser.values.push_back(r.Q);
        qmin = std::min(qmin, r.Q);
      }
      series.push_back(ser);
      csv += harnack_csv(sweep);
      st.checks.push_back(make_check("min Q", qmin, ">=", 1.0));
      st.checks.push_back(make_check("C_hat", sweep.C_hat, "<", kInf));
    });
  }
  if (!csv.empty()) run.write("harnack.csv", csv);
  run.plot("harnack.svg", sweep_svg(series, run.meta("Harnack quotients")));
  if (C.size() == 2) {
    run.stage("refinement", [&](Stage& st, json& out) {
      const double change = std::abs(C[1] - C[0]) / C[0];
      out = {{"C_hat", C}, {"relative_change", change}};
      st.checks.push_back(make_check("relative change of C_hat", change, "<=", run.real("tolerance")));
    });
  }
  run.stage("constants", [&](Stage& st, json& out) {
    out = json::array();
    double worst = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
      HarnackFixture f;
      f.s = s;
      f.c = 1.7;
      const auto r = harnack_quotient(solve_harnack_fixture(f, grids.front()), 0.0, R, kappa);
      out.push_back({{"s", s}, {"Q", r.Q}});
      worst = std::max(worst, std::abs(r.Q - 1.0));
    }
    st.checks.push_back(make_check("max |Q - 1| on constants", worst, "<=", 1e-10));
  });
  run.stage("maximum-principle", [&](Stage& st, json& out) {
    std::vector<json> rows(family.size());
    std::vector<double> excess(family.size());
    parallel_for(family.size(), [&](std::size_t i) {
      const auto state = solve_harnack_fixture(family[i], grids.front());
      const auto e = extrema_report(state);
      rows[i] = to_json(e);
      excess[i] = std::max(e.max_excess(), e.min_excess()) / (std::abs(e.boundary_max) + 1.0);
    });
    out = rows;
    double worst = -kInf;
    for (double v : excess) worst = std::max(worst, v);
    st.checks.push_back(make_check("largest interior excess over the boundary", worst, "<=", 1e-12));
  });
  run.stage("z-derivative-decay", [&](Stage& st, json& out) {
    out = json::array();
    for (double s : {0.25, 0.5, 0.75}) {
      const double q = std::pow(2.0, -1.0 / 8.0);
      ExtensionProblem p;
      p.s = s;
      p.bottom_data = [](double, double) { return 0.0; };
      p.dirichlet = [](double x, double, double z) { return std::exp(x) * (1.0 + z) + std::cos(3.0 * x); };
      const ExtensionMesh mesh{TensorMesh({uniform_axis(-std::numbers::sqrt2, std::numbers::sqrt2, 128)}),
                               geometric_axis_from_zero(2.0 * std::sqrt(1.0 - s), q, 1e-7)};
      const auto state = solve_extension(p, mesh);
      st.residual = std::max(st.residual, state.interior_residual);
      std::vector<double> zs;
      for (int j = 3; j <= 12; ++j) zs.push_back(std::ldexp(1.0, -j));
      const auto d = dz_decay(state, 0.25, zs);
      out.push_back({{"s", s}, {"exponent", d.exponent}, {"target", 1.0 / s - 1.0}, {"z", d.scale}, {"sup", d.value}});
      st.checks.push_back(
          make_check("s=" + std::to_string(s).substr(0, 4) + " |exponent - (1/s - 1)|", std::abs(d.exponent - (1.0 / s - 1.0)), "<=", 0.1));
    }
  });
}

// ---------------------------------------------------------------- schauder

void schauder_pipeline(Run& run) {
  const double s = run.config.setup.s, alpha = run.config.setup.alpha;
  const bool harmonic = run.text("problem") == "harmonic";
  const SelfSimilarMesh mesh{static_cast<int>(run.integer("per_octave")), run.real("x_smallest"),
                             run.real("y_smallest")};
  const double rho = run.real("rho"), tol = run.real("tolerance");
  const std::size_t depth = run.count("depth");
  DecayOptions opts;
  opts.first = run.count("first");
  const double target = alpha + 2.0 * s;

  ExtensionState state;
  run.stage("solve", [&](Stage& st, json& out) {
    state = harmonic ? harmonic_benchmark(s, mesh) : kinked_benchmark(s, alpha, mesh);
    st.residual = std::max(state.interior_residual, state.neumann_residual);
    out = {{"lateral_nodes", state.x.size()}, {"vertical_nodes", state.nz()},
           {"interior_residual", num(state.interior_residual)}, {"neumann_residual", num(state.neumann_residual)}};
    run.plot("solution.svg", heatmap_svg(state, run.meta(harmonic ? "harmonic benchmark" : "kinked benchmark")));
  });
  if (state.U.empty()) return;

  std::vector<int> orders;
  if (const int o = static_cast<int>(run.integer("order")); o >= 0) orders.push_back(o);
  else if (harmonic) orders = {0, 1, 2};
  else orders.push_back(schauder_order(alpha, s));

  std::string csv;
  for (int k : orders) {
    run.stage("decay-order-" + std::to_string(k), [&](Stage& st, json& out) {
      const auto r = schauder_decay(state, k, rho, depth, opts);
      out = to_json(r);
      st.residual = r.noise_floor;
      csv += decay_csv(r);
      // Smooth data: the error falls at least like the first omitted order.
      const double reference = harmonic ? k + 1.0 : target;
      out["reference_slope"] = reference;
      st.checks.push_back(make_check("levels in the fit", static_cast<double>(r.used), ">=", 3.0));
      if (harmonic) st.checks.push_back(make_check("exponent", r.exponent, ">=", reference - tol));
      else st.checks.push_back(make_check("|exponent - (alpha + 2s)|", std::abs(r.exponent - target), "<=", tol));
      run.plot("decay-order-" + std::to_string(k) + ".svg",
               decay_svg(r, reference, run.meta("decay of the order-" + std::to_string(k) + " fit")));
    });
    if (run.flag("campanato") && !harmonic) {
      run.stage("campanato-order-" + std::to_string(k), [&](Stage& st, json& out) {
        const auto r = campanato_iterate(state, k, rho, depth, target);
        out = to_json(r);
        st.checks.push_back(make_check("D_hat", r.D_hat, "<", kInf));
      });
    }
  }
  if (!csv.empty()) run.write("decay.csv", csv);
}

// ---------------------------------------------------------------- end to end

void end_to_end_pipeline(Run& run) {
  const double s = run.config.setup.s, alpha = run.config.setup.alpha;
  const std::string problem = run.text("problem");
  const double k = static_cast<double>(run.integer("k")), kink = run.real("kink");
  run.stage("regularity", [&](Stage& st, json& out) {
    const TensorMesh mesh({uniform_axis(0.0, std::numbers::pi, run.count("cells"))});
    const SemigroupStepper L(mesh, CoefficientField::identity(1));
    FractionalRegularityProblem p;
    p.s = s;
    p.alpha = alpha;
    p.a = run.real("a");
    p.b = run.real("b");
    if (problem == "eigenfunction") p.f = GridFunction::sample_dirichlet(mesh, [k](double x, double) { return std::sin(k * x); });
    else if (problem == "kinked")
      p.f = GridFunction::sample_dirichlet(mesh, [kink](double x, double) { return std::abs(x - kink) * std::sin(x); });
    else p.f = GridFunction(mesh, 0.0);
    const auto r = end_to_end_fractional_regularity(L, p);
    out = to_json(r);
    st.checks.push_back(make_check("ratio", r.ratio, "<", kInf));
    if (problem == "eigenfunction") {
      double err = 0.0;
      const double scale = std::pow(k, -2.0 * s);
      for (std::size_t i = 0; i < mesh.size(); ++i) err = std::max(err, std::abs(r.u[i] - scale * p.f[i]));
      out["relative_sup_error"] = err / scale;
      st.checks.push_back(make_check("relative sup error of u", err / scale, "<=", 1e-3));
    }
    if (problem == "zero") st.checks.push_back(make_check("sup |u|", r.u_sup, "==", 0.0));
    std::ostringstream csv;
    write_csv(csv, r.u);
    run.write("solution.csv", csv.str());
  });
}

}  // namespace

RunManifest run(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig effective = config;
  if (options.seed) effective.seed = *options.seed;
  set_thread_count(options.threads);
  const std::string hash = config_hash(effective);

  fs::path dir;
  if (!options.out_dir.empty()) dir = options.out_dir;
  else if (!config.output.empty()) dir = config.output;
  else dir = fs::path(default_output_root()) / (std::string(kind_name(config.kind)) + "-" + hash);
  fs::create_directories(dir);

  RunManifest m;
  m.config_hash = hash;
  m.config = to_json(effective);
  m.out_dir = dir.string();
  m.started = utc_now();

  Run r(effective, options, dir, hash);
  switch (effective.kind) {
    case ExperimentKind::GeometryCheck: geometry_pipeline(r); break;
    case ExperimentKind::FractionalApply: fractional_pipeline(r); break;
    case ExperimentKind::SolveExtension: extension_pipeline(r); break;
    case ExperimentKind::BarrierCheck: barrier_pipeline(r); break;
    case ExperimentKind::SlideParaboloids: paraboloid_pipeline(r); break;
    case ExperimentKind::Harnack: harnack_pipeline(r); break;
    case ExperimentKind::SchauderDecay: schauder_pipeline(r); break;
    case ExperimentKind::EndToEnd: end_to_end_pipeline(r); break;
  }

  json report;
  report["config_hash"] = hash;
  report["tool_version"] = kToolVersion;
  report["config"] = m.config;
  json stages = json::array();
  for (const auto& st : r.stages) stages.push_back(stage_json(st));
  report["stages"] = stages;
  report["data"] = r.data;
  report["passed"] = std::all_of(r.stages.begin(), r.stages.end(), [](const Stage& st) { return st.passed(); });
  r.write("report.json", report.dump(2) + "\n");

  m.stages = std::move(r.stages);
  m.outputs = std::move(r.outputs);
  m.finished = utc_now();
  const std::string manifest = to_json(m).dump(2) + "\n";
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest;
  return m;
}

json to_json(const RunManifest& m) {
  json stages = json::array();
  for (const auto& st : m.stages) {
    json j = stage_json(st);
    j["seconds"] = st.seconds;
    stages.push_back(j);
  }
  json outputs = json::array();
  for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv1a64", o.fnv1a}});
  return {{"config_hash", m.config_hash}, {"tool_version", m.tool_version}, {"started", m.started},
          {"finished", m.finished},       {"out_dir", m.out_dir},           {"config", m.config},
          {"stages", stages},             {"outputs", outputs},             {"passed", m.passed()}};
}

}  // namespace fraclab::io
