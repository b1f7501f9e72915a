#include "fraclab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>

#include "fraclab/parallel.hpp"
#include "fraclab/semigroup.hpp"

namespace fraclab {

ExtensionMesh self_similar_mesh(double s, const SelfSimilarMesh& spec) {
  const double q = std::pow(2.0, -1.0 / spec.per_octave);
  const double L = 2.0 * std::numbers::sqrt2;
  const double Y = 4.0 * std::sqrt(1.0 - s);
  return {TensorMesh({geometric_axis_symmetric(L, q, spec.x_smallest)}),
          geometric_axis_from_zero(Y, q, spec.y_smallest)};
}

ExtensionState kinked_benchmark(double s, double alpha, const SelfSimilarMesh& spec) {
  ExtensionProblem p;
  p.s = s;
  p.bottom_data = [alpha](double x, double) { return std::pow(std::abs(x), alpha); };
  p.dirichlet = [](double, double, double) { return 0.0; };
  return solve_extension(p, self_similar_mesh(s, spec));
}

ExtensionState harmonic_benchmark(double s, const SelfSimilarMesh& spec) {
  ExtensionProblem p;
  p.s = s;
  p.bottom_data = [](double, double) { return 0.0; };
  p.dirichlet = [](double x, double, double z) { return std::cosh(x) * (1.0 + z) + std::cos(2.0 * x) * z + std::sin(x); };
  return solve_extension(p, self_similar_mesh(s, spec));
}

double eigen_profile(double s, double k, double y) {
  if (y == 0.0) return 1.0;
  const double t = k * y;
  return std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(t, s) * boost::math::cyl_bessel_k(s, t);
}

ExtensionProblem eigen_problem(double s, double k, BottomCondition bottom) {
  ExtensionProblem p;
  p.s = s;
  p.bottom = bottom;
  const double flux = -ds_constant(s) * std::pow(k, 2.0 * s);
  if (bottom == BottomCondition::Neumann) p.bottom_data = [=](double x, double) { return flux * std::sin(k * x); };
  else p.bottom_data = [=](double x, double) { return std::sin(k * x); };
  p.dirichlet = [=](double x, double, double z) { return std::sin(k * x) * eigen_profile(s, k, transform_to_y(z, s)); };
  return p;
}

ExtensionMesh eigen_mesh(double s, std::size_t cells) {
  return make_extension_mesh(TensorMesh({uniform_axis(0.0, std::numbers::pi, cells)}), s, transform_to_z(8.0, s), cells);
}

SlidingFixture sliding_fixture(const MAGeometry& g, std::size_t cells, double depth) {
  if (cells < 2 || cells % 2 != 0) throw std::invalid_argument("sliding_fixture: cells must be even and >= 2");
  const Axis X = uniform_axis(-1.0, 1.0, cells);
  const double H = g.dh(1.0);
  Axis Z(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j)
    Z[j] = g.dh_inverse(-H + 2.0 * H * static_cast<double>(j) / static_cast<double>(cells));
  Z[cells / 2] = 0.0;
  const TensorMesh mesh({X, Z});
  SlidingFixture f;
  const double p0[1] = {0.1};
  f.U = GridFunction::sample(mesh, [&](double x, double z) {
    const double xx[1] = {x};
    return depth * g.delta_Phi(p0, 0.1, xx, z);
  });
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const auto p = mesh.point(i);
    if (std::abs(p[0]) < 0.5 && std::abs(g.dh(p[1])) < 0.5 * H) f.vertices.push_back(i);
  }
  return f;
}

double HarnackFixture::boundary(double x, double z) const {
  double v = c;
  for (int m = 0; m < 3; ++m) v += a[m] * std::cos(1.3 * (m + 1) * x + phase[m]) * std::exp(-decay * z);
  return v;
}

std::vector<HarnackFixture> harnack_family(std::size_t count, std::uint64_t seed) {
  // Raw 53-bit draws keep the family identical across standard libraries.
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  constexpr std::array<double, 3> orders{0.25, 0.5, 0.75};
  std::vector<HarnackFixture> out;
  for (std::size_t i = 0; i < count; ++i) {
    HarnackFixture f;
    f.s = orders[i % 3];
    f.c = 1.0 + unit();
    double total = 0.0;
    for (int m = 0; m < 3; ++m) {
      f.a[m] = 2.0 * unit() - 1.0;
      total += std::abs(f.a[m]);
      f.phase[m] = 2.0 * std::numbers::pi * unit();
    }
    for (double& am : f.a) am *= 0.95 * f.c / total;
    f.decay = 2.0 * unit();
    out.push_back(f);
  }
  return out;
}

ExtensionState solve_harnack_fixture(const HarnackFixture& f, std::size_t cells) {
  ExtensionProblem p;
  p.s = f.s;
  p.bottom_data = [](double, double) { return 0.0; };
  p.dirichlet = [f](double x, double, double z) { return f.boundary(x, z); };
  const double L = std::numbers::sqrt2;
  const auto mesh = make_extension_mesh(TensorMesh({uniform_axis(-L, L, cells)}), f.s, section_constant(f.s), cells);
  return solve_extension(p, mesh);
}

HarnackSweep harnack_sweep(const std::vector<HarnackFixture>& family, std::size_t cells, double R, double kappa) {
  HarnackSweep out;
  out.reports.resize(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    out.reports[i] = harnack_quotient(solve_harnack_fixture(family[i], cells), 0.0, R, kappa);
  });
  for (const auto& r : out.reports) out.C_hat = std::max(out.C_hat, r.Q);
  return out;
}

}  // namespace fraclab
