#include "fraclab/semigroup.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fraclab/parallel.hpp"

namespace fraclab {

using SpMat = Eigen::SparseMatrix<double>;
using EVec = Eigen::VectorXd;

void QuadratureSpec::validate() const {
  std::ostringstream err;
  if (!(t_min > 0.0)) err << "t_min=" << t_min << " must be > 0; ";
  if (!(t_max > t_min)) err << "t_max=" << t_max << " must exceed t_min; ";
  if (nodes < 8) err << "nodes=" << nodes << " must be >= 8; ";
  if (substeps < 1) err << "substeps must be >= 1; ";
  if (const auto msg = err.str(); !msg.empty()) throw std::invalid_argument("quadrature: " + msg);
}

QuadratureRule make_rule(const QuadratureSpec& spec) {
  spec.validate();
  const std::size_t n = spec.nodes;
  const double L = std::log(spec.t_max / spec.t_min);
  const double h = L / static_cast<double>(n - 1);
  QuadratureRule r;
  r.t.resize(n);
  r.w.assign(n, h);
  // Fourth-order Gregory end corrections for the trapezoid rule.
  constexpr double g[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (std::size_t k = 0; k < 3; ++k) {
    r.w[k] *= g[k];
    r.w[n - 1 - k] *= g[k];
  }
  for (std::size_t j = 0; j < n; ++j) {
    r.t[j] = spec.t_min * std::exp(h * static_cast<double>(j));
    r.w[j] *= r.t[j];  // dt = t d(log t)
  }
  r.t.back() = spec.t_max;
  return r;
}

struct SemigroupStepper::Impl {
  std::vector<std::size_t> interior;          // mesh index of each unknown
  std::vector<std::ptrdiff_t> unknown_of;     // -1 on boundary
  SpMat A;                                    // L_h on interior unknowns
};

SemigroupStepper::SemigroupStepper(TensorMesh mesh, CoefficientField a, Integrator integrator,
                                   double dt_max)
    : mesh_(std::move(mesh)),
      a_(std::move(a)),
      integrator_(integrator),
      dt_max_(dt_max),
      impl_(std::make_unique<Impl>()) {
  if (!(dt_max_ > 0.0)) throw std::invalid_argument("SemigroupStepper: dt_max must be positive");
  a_.check_ellipticity(mesh_);
  stencil_ = assemble_stencil(mesh_, a_);
  auto& im = *impl_;
  im.unknown_of.assign(mesh_.size(), -1);
  for (std::size_t i = 0; i < mesh_.size(); ++i)
    if (!mesh_.is_boundary(i)) {
      im.unknown_of[i] = static_cast<std::ptrdiff_t>(im.interior.size());
      im.interior.push_back(i);
    }
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < im.interior.size(); ++r) {
    const std::size_t node = im.interior[r];
    for (std::size_t k = stencil_.row_start[node]; k < stencil_.row_start[node + 1]; ++k) {
      const auto u = im.unknown_of[stencil_.col[k]];
      if (u >= 0) trip.emplace_back(static_cast<int>(r), static_cast<int>(u), -stencil_.weight[k]);
    }
  }
  const auto n = static_cast<int>(im.interior.size());
  im.A.resize(n, n);
  im.A.setFromTriplets(trip.begin(), trip.end());
  im.A.makeCompressed();
}

SemigroupStepper::~SemigroupStepper() = default;
SemigroupStepper::SemigroupStepper(SemigroupStepper&&) noexcept = default;
SemigroupStepper& SemigroupStepper::operator=(SemigroupStepper&&) noexcept = default;

void SemigroupStepper::require_dirichlet(const GridFunction& u) const {
  if (!(u.mesh() == mesh_)) throw std::invalid_argument("semigroup: grid function on a different mesh");
  if (u.boundary_max_abs() != 0.0)
    throw std::invalid_argument("semigroup: input must vanish on Dirichlet nodes");
  if (!u.finite()) throw std::invalid_argument("semigroup: input has non-finite values");
}

void SemigroupStepper::advance(std::vector<double>& interior, double dt, std::size_t steps) const {
  if (steps == 0 || dt == 0.0) return;
  const auto& A = impl_->A;
  const auto n = A.rows();
  SpMat I(n, n);
  I.setIdentity();
  const double theta = integrator_ == Integrator::CrankNicolson ? 0.5 : 1.0;
  SpMat lhs = I + (theta * dt) * A;
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(lhs);
  lu.factorize(lhs);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("heat step: factorization failed (dt=" + std::to_string(dt) +
                             "): " + lu.lastErrorMessage());
  Eigen::Map<EVec> v(interior.data(), n);
  EVec rhs(n);
  for (std::size_t k = 0; k < steps; ++k) {
    if (theta == 1.0)
      rhs = v;
    else
      rhs = v - ((1.0 - theta) * dt) * (A * v);
    v = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw std::runtime_error("heat step: solve failed");
  }
}

GridFunction SemigroupStepper::heat_apply(const GridFunction& u, double t) const {
  if (t < 0.0) throw std::invalid_argument("heat_apply: t must be >= 0");
  const auto m = static_cast<std::size_t>(std::ceil(t / dt_max_ - 1e-12));
  return heat_apply_steps(u, t, std::max<std::size_t>(m, 1));
}

GridFunction SemigroupStepper::heat_apply_steps(const GridFunction& u, double t, std::size_t steps) const {
  require_dirichlet(u);
  if (t < 0.0) throw std::invalid_argument("heat_apply: t must be >= 0");
  if (t == 0.0) return u;
  const auto& im = *impl_;
  std::vector<double> v(im.interior.size());
  for (std::size_t r = 0; r < v.size(); ++r) v[r] = u[im.interior[r]];
  advance(v, t / static_cast<double>(steps), steps);
  GridFunction out(mesh_);
  for (std::size_t r = 0; r < v.size(); ++r) out[im.interior[r]] = v[r];
  return out;
}

std::vector<GridFunction> SemigroupStepper::heat_ladder(const GridFunction& u, const std::vector<double>& times,
                                                        std::size_t substeps) const {
  require_dirichlet(u);
  const auto& im = *impl_;
  std::vector<double> v(im.interior.size());
  for (std::size_t r = 0; r < v.size(); ++r) v[r] = u[im.interior[r]];
  std::vector<GridFunction> out;
  out.reserve(times.size());
  double now = 0.0;
  for (double t : times) {
    if (t < now) throw std::invalid_argument("heat_ladder: times must be increasing");
    advance(v, (t - now) / static_cast<double>(substeps), substeps);
    now = t;
    GridFunction g(mesh_);
    for (std::size_t r = 0; r < v.size(); ++r) g[im.interior[r]] = v[r];
    out.push_back(std::move(g));
  }
  return out;
}

GridFunction SemigroupStepper::apply_operator(const GridFunction& u) const {
  if (!(u.mesh() == mesh_)) throw std::invalid_argument("apply_operator: mesh mismatch");
  GridFunction out(mesh_);
  for (std::size_t node : impl_->interior) out[node] = -stencil_.apply(node, u.values());
  return out;
}

double gamma_negative(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("gamma_negative: s in (0,1)");
  const double g = -std::numbers::pi / (std::sin(std::numbers::pi * s) * std::tgamma(1.0 + s));
  if (!(g < 0.0)) throw std::logic_error("Gamma(-s) must be negative");
  return g;
}

double ds_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("ds_constant: s in (0,1)");
  // Gamma(1+s) = s Gamma(s); written this way the s = 1/2 value is exactly 1.
  return std::pow(s, 2.0 * s) * std::tgamma(1.0 - s) / (s * std::tgamma(s));
}

namespace {

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Upper incomplete gamma for a in (-1, 1) \ {0}, x > 0.
double upper_gamma(double a, double x) {
  if (a > 0.0) return boost::math::tgamma(a, x);
  // Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a
  return (boost::math::tgamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

}  // namespace

FractionalResult fractional_apply(const SemigroupStepper& L, const GridFunction& u, double s,
                                  const QuadratureSpec& quad) {
  const auto rule = make_rule(quad);
  const auto ladder = L.heat_ladder(u, rule.t, quad.substeps);
  const GridFunction Lu = L.apply_operator(u);
  const GridFunction L2u = L.apply_operator(Lu);
  const double G = gamma_negative(s);
  std::vector<double> acc(u.size(), 0.0);
  for (std::size_t j = 0; j < rule.t.size(); ++j) {
    const double wt = rule.w[j] * std::pow(rule.t[j], -1.0 - s);
    axpy(acc, wt, ladder[j].values());
    axpy(acc, -wt, u.values());
  }
  const double a0 = std::pow(quad.t_min, 1.0 - s) / (1.0 - s);
  const double b0 = std::pow(quad.t_min, 2.0 - s) / (2.0 * (2.0 - s));
  const double tail_inf = std::pow(quad.t_max, -s) / s;
  axpy(acc, -a0, Lu.values());
  axpy(acc, b0, L2u.values());
  axpy(acc, -tail_inf, u.values());
  FractionalResult res{GridFunction(u.mesh(), std::move(acc))};
  for (auto& v : res.value.values()) v /= G;
  for (std::size_t i = 0; i < res.value.size(); ++i)
    if (u.mesh().is_boundary(i)) res.value[i] = 0.0;
  const double aG = std::abs(G);
  res.upper_tail = u.max_abs() * tail_inf / aG;
  res.lower_tail = (a0 * Lu.max_abs() + b0 * L2u.max_abs()) / aG;
  res.upper_tail_residual = ladder.back().max_abs() * tail_inf / aG;
  const GridFunction L3u = L.apply_operator(L2u);
  res.lower_tail_residual = L3u.max_abs() * std::pow(quad.t_min, 3.0 - s) / (6.0 * (3.0 - s)) / aG;
  return res;
}

FractionalResult fractional_inverse(const SemigroupStepper& L, const GridFunction& f, double s,
                                    const QuadratureSpec& quad) {
  const auto rule = make_rule(quad);
  const auto ladder = L.heat_ladder(f, rule.t, quad.substeps);
  const GridFunction Lf = L.apply_operator(f);
  std::vector<double> acc(f.size(), 0.0);
  for (std::size_t j = 0; j < rule.t.size(); ++j)
    axpy(acc, rule.w[j] * std::pow(rule.t[j], s - 1.0), ladder[j].values());
  const double a0 = std::pow(quad.t_min, s) / s;
  const double b0 = std::pow(quad.t_min, 1.0 + s) / (1.0 + s);
  axpy(acc, a0, f.values());
  axpy(acc, -b0, Lf.values());
  const double G = std::tgamma(s);
  FractionalResult res{GridFunction(f.mesh(), std::move(acc))};
  for (auto& v : res.value.values()) v /= G;
  res.lower_tail = (a0 * f.max_abs() + b0 * Lf.max_abs()) / G;
  res.lower_tail_residual = L.apply_operator(Lf).max_abs() * std::pow(quad.t_min, 2.0 + s) / (2.0 * (2.0 + s)) / G;
  // Beyond t_max the ladder decays at least like its last observed rate.
  const std::size_t n = ladder.size();
  const double last = ladder[n - 1].max_abs(), prev = ladder[n - 2].max_abs();
  if (last == 0.0) {
    res.upper_tail_residual = 0.0;
  } else if (prev > last) {
    const double rate = std::log(prev / last) / (rule.t[n - 1] - rule.t[n - 2]);
    res.upper_tail_residual = last * std::pow(quad.t_max, s - 1.0) / rate / G;
  } else {
    res.upper_tail_residual = std::numeric_limits<double>::infinity();
  }
  return res;
}

ExtensionSlices extension_via_semigroup(const SemigroupStepper& L, const GridFunction& u, double s,
                                        const std::vector<double>& zs, const QuadratureSpec& quad) {
  for (double z : zs)
    if (!(z > 0.0)) throw std::invalid_argument("extension_via_semigroup: z must be > 0");
  const auto rule = make_rule(quad);
  const auto ladder = L.heat_ladder(u, rule.t, quad.substeps);
  const GridFunction Lu = L.apply_operator(u);
  ExtensionSlices out;
  out.z = zs;
  out.values.resize(zs.size());
  const double Gs = std::tgamma(s);
  parallel_for(zs.size(), [&](std::size_t k) {
    const double z = zs[k];
    const double a = s * s * std::pow(z, 1.0 / s);
    std::vector<double> acc(u.size(), 0.0);
    for (std::size_t j = 0; j < rule.t.size(); ++j) {
      const double ker = std::exp(-a / rule.t[j]);
      if (ker == 0.0) continue;
      axpy(acc, rule.w[j] * ker * std::pow(rule.t[j], -1.0 - s), ladder[j].values());
    }
    const double x = a / quad.t_min;
    axpy(acc, std::pow(a, -s) * upper_gamma(s, x), u.values());
    axpy(acc, -std::pow(a, 1.0 - s) * upper_gamma(s - 1.0, x), Lu.values());
    const double pref = std::pow(s, 2.0 * s) * z / Gs;
    for (auto& v : acc) v *= pref;
    out.values[k] = GridFunction(u.mesh(), std::move(acc));
  });
  return out;
}

GridFunction extension_via_semigroup(const SemigroupStepper& L, const GridFunction& u, double s,
                                     double z, const QuadratureSpec& quad) {
  return std::move(extension_via_semigroup(L, u, s, std::vector<double>{z}, quad).values.front());
}

double scalar_fractional(double lambda, double s, const QuadratureSpec& quad) {
  const auto rule = make_rule(quad);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.t.size(); ++j)
    acc += rule.w[j] * std::expm1(-lambda * rule.t[j]) * std::pow(rule.t[j], -1.0 - s);
  acc += -lambda * std::pow(quad.t_min, 1.0 - s) / (1.0 - s);
  acc += lambda * lambda * std::pow(quad.t_min, 2.0 - s) / (2.0 * (2.0 - s));
  acc += -std::pow(quad.t_max, -s) / s;
  return acc / gamma_negative(s);
}

double scalar_inverse(double lambda, double s, const QuadratureSpec& quad) {
  const auto rule = make_rule(quad);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.t.size(); ++j)
    acc += rule.w[j] * std::exp(-lambda * rule.t[j]) * std::pow(rule.t[j], s - 1.0);
  acc += std::pow(quad.t_min, s) / s - lambda * std::pow(quad.t_min, 1.0 + s) / (1.0 + s);
  return acc / std::tgamma(s);
}

double scalar_extension_profile(double lambda, double s, double z, const QuadratureSpec& quad) {
  if (!(z > 0.0)) throw std::invalid_argument("scalar_extension_profile: z must be > 0");
  const auto rule = make_rule(quad);
  const double a = s * s * std::pow(z, 1.0 / s);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.t.size(); ++j)
    acc += rule.w[j] * std::exp(-a / rule.t[j] - lambda * rule.t[j]) * std::pow(rule.t[j], -1.0 - s);
  const double x = a / quad.t_min;
  acc += std::pow(a, -s) * upper_gamma(s, x) - lambda * std::pow(a, 1.0 - s) * upper_gamma(s - 1.0, x);
  return acc * std::pow(s, 2.0 * s) * z / std::tgamma(s);
}

double discrete_laplacian_eigenvalue(double k, double dx) {
  return 2.0 * (1.0 - std::cos(k * dx)) / (dx * dx);
}

}  // namespace fraclab
