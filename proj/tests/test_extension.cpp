#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "fraclab/extension.hpp"
#include "fraclab/problems.hpp"
#include "fraclab/semigroup.hpp"

using namespace fraclab;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

// Bessel form of the eigen profile, computed apart from the library helper.
double bessel_profile(double s, double k, double y) {
  if (y == 0.0) return 1.0;
  return std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(k * y, s) * boost::math::cyl_bessel_k(s, k * y);
}

double eigen_error(const ExtensionState& st, double k) {
  double e = 0.0;
  const Axis& X = st.x.axis(0);
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = st.zero_row(); j < st.nz(); ++j)
      e = std::max(e, std::abs(st.at(i, j) - std::sin(k * X[i]) * bessel_profile(st.s, k, std::abs(st.y[j]))));
  return e;
}

ExtensionProblem harmonic(double s, std::function<double(double, double, double)> g) {
  ExtensionProblem p;
  p.s = s;
  p.bottom_data = [](double, double) { return 0.0; };
  p.dirichlet = std::move(g);
  return p;
}

ExtensionMesh box(double s, std::size_t cells) {
  return make_extension_mesh(TensorMesh({uniform_axis(-1.0, 1.0, cells)}), s, 1.0, cells);
}

}  // namespace

TEST_CASE("vertical change of variables") {
  for (double z : {0.0, 1e-3, 0.4, 2.0}) CHECK(transform_to_y(z, 0.5) == z);
  for (double s : {0.2, 0.5, 0.8})
    for (double z : {1e-6, 0.3, 1.7}) {
      CHECK(transform_to_y(z, s) == Approx(2 * s * std::pow(z, 1 / (2 * s))).epsilon(1e-14));
      CHECK(transform_to_z(transform_to_y(z, s), s) == Approx(z).epsilon(1e-13));
    }
  CHECK(default_grading(0.25) == 1.0);
  CHECK(default_grading(0.75) == Approx(2.0));
  const auto m = make_extension_mesh(TensorMesh({uniform_axis(0, 1, 4)}), 0.75, 2.0, 10);
  CHECK(m.vertical.front() == 0.0);
  CHECK(m.vertical.back() == Approx(transform_to_y(2.0, 0.75)));
  const auto native = make_extension_mesh(TensorMesh({uniform_axis(0, 1, 4)}), 0.75, 2.0, 10, std::nullopt,
                                          CoordinateMode::NativeZ);
  CHECK(native.vertical.back() == Approx(2.0));
}

TEST_CASE("constants and affine data are reproduced exactly") {
  for (double s : {0.25, 0.5, 0.75}) {
    const auto one = solve_extension(harmonic(s, [](double, double, double) { return 1.0; }), box(s, 16));
    for (double v : one.U) CHECK(v == Approx(1.0).epsilon(1e-12));
    // U = x has zero flux and is killed by both second-order parts.
    const auto lin = solve_extension(harmonic(s, [](double x, double, double) { return x; }), box(s, 16));
    const Axis& X = lin.x.axis(0);
    for (std::size_t i = 0; i < X.size(); ++i)
      for (std::size_t j = 0; j < lin.nz(); ++j) CHECK(lin.at(i, j) == Approx(X[i]).epsilon(1e-11).scale(1.0));
    CHECK(lin.interior_residual < 1e-10);
  }
}

TEST_CASE("eigenfunction benchmark converges") {
  for (double s : {0.25, 0.5, 0.75}) {
    CAPTURE(s);
    for (auto bottom : {BottomCondition::Neumann, BottomCondition::Dirichlet}) {
      const double e32 = eigen_error(solve_extension(eigen_problem(s, 2.0, bottom), eigen_mesh(s, 32)), 2.0);
      const double e64 = eigen_error(solve_extension(eigen_problem(s, 2.0, bottom), eigen_mesh(s, 64)), 2.0);
      CAPTURE(e32);
      CAPTURE(e64);
      CHECK(e64 < 2e-2);
      // At least first order; the graded mesh is designed for second.
      CHECK(e64 < 0.5 * e32);
    }
  }
}

TEST_CASE("Neumann and Dirichlet solves see the same trace and flux") {
  const double s = 0.5, k = 1.0;
  const auto neu = solve_extension(eigen_problem(s, k, BottomCondition::Neumann), eigen_mesh(s, 64));
  const auto dir = solve_extension(eigen_problem(s, k, BottomCondition::Dirichlet), eigen_mesh(s, 64));
  const Axis& X = neu.x.axis(0);
  for (std::size_t i = 1; i + 1 < X.size(); ++i) {
    CHECK(neu.trace[i] == Approx(std::sin(k * X[i])).epsilon(1e-2).scale(1.0));
    CHECK(dir.trace[i] == Approx(std::sin(k * X[i])).epsilon(1e-14).scale(1.0));
    CHECK(dir.flux[i] == Approx(neu.flux[i]).epsilon(2e-2).scale(1.0));
  }
  CHECK(neu.bottom == BottomCondition::Neumann);
  CHECK(dir.bottom == BottomCondition::Dirichlet);
}

TEST_CASE("Dirichlet flux extrapolates to the trace constant") {
  for (double s : {0.25, 0.5, 0.75}) {
    CAPTURE(s);
    const double k = 2.0, exact = -ds_constant(s) * std::pow(k, 2 * s);
    // Flux at x = pi/4 on meshes 32, 64, 128; the observed order sets the extrapolation.
    std::array<double, 3> f{};
    for (int l = 0; l < 3; ++l) {
      const std::size_t n = 32u << l;
      const auto st = solve_extension(eigen_problem(s, k, BottomCondition::Dirichlet), eigen_mesh(s, n));
      f[l] = st.flux[n / 4];
    }
    const double ratio = (f[0] - f[1]) / (f[1] - f[2]);
    REQUIRE(ratio > 1.0);
    const double extrapolated = f[2] - (f[1] - f[2]) / (ratio - 1.0);
    CHECK(extrapolated == Approx(exact).epsilon(1e-2));
  }
}

TEST_CASE("maximum principle on harmonic solves") {
  for (double s : {0.25, 0.5, 0.75}) {
    const auto st = solve_extension(
        harmonic(s, [](double x, double, double z) { return std::sin(3 * x) * std::exp(-z) + 0.3 * x * x; }),
        box(s, 32));
    const auto r = extrema_report(st);
    CHECK(r.max_excess() <= 1e-12);
    CHECK(r.min_excess() <= 1e-12);
    CHECK(st.monotone);
  }
}

TEST_CASE("even reflection") {
  const auto st = solve_extension(eigen_problem(0.5, 1.0, BottomCondition::Neumann), eigen_mesh(0.5, 16));
  const auto r = reflect_even(st);
  REQUIRE(r.nz() == 2 * st.nz() - 1);
  CHECK(r.reflected);
  CHECK(r.z[r.zero_row()] == 0.0);
  for (std::size_t i = 0; i < r.x.size(); ++i)
    for (std::size_t j = 1; j < st.nz(); ++j) {
      CHECK(r.z[r.zero_row() - j] == -r.z[r.zero_row() + j]);
      CHECK(r.at(i, r.zero_row() - j) == r.at(i, r.zero_row() + j));
      CHECK(r.at(i, r.zero_row() + j) == st.at(i, j));
    }
}

TEST_CASE("rescaling") {
  const double s = 0.75, k = 2.0;
  const auto st = solve_extension(eigen_problem(s, k, BottomCondition::Neumann), eigen_mesh(s, 64));
  SUBCASE("rho = 1 is the identity") {
    const auto same = rescale_solution(st, 1.0);
    for (std::size_t i = 0; i < st.U.size(); ++i) CHECK(same.U[i] == Approx(st.U[i]).epsilon(1e-13).scale(1.0));
    CHECK(same.scale == 1.0);
  }
  SUBCASE("rho = 1/2 matches the scaled exact extension") {
    // y(rho^{2s} z) = rho y(z), so V(x,z) = sin(k rho x) P(k rho y).
    const double rho = 0.5;
    const auto v = rescale_solution(st, rho);
    CHECK(v.scale == rho);
    double e = 0.0;
    const Axis& X = v.x.axis(0);
    for (std::size_t i = 0; i < X.size(); ++i)
      for (std::size_t j = 0; j < v.nz(); ++j)
        e = std::max(e, std::abs(v.at(i, j) - std::sin(k * rho * X[i]) * bessel_profile(s, k * rho, v.y[j])));
    CHECK(e < 2e-2);
    // Flux picks up rho^{2s}.
    const std::size_t mid = X.size() / 2;
    CHECK(v.flux[mid] == Approx(std::pow(rho, 2 * s) * -ds_constant(s) * std::pow(k, 2 * s) * std::sin(k * rho * X[mid]))
                             .epsilon(3e-2));
  }
  CHECK_THROWS_AS((void)rescale_solution(st, 2.0), std::out_of_range);
  CHECK_THROWS_AS((void)rescale_solution(st, 0.0), std::invalid_argument);
}

TEST_CASE("derivative decay and lateral scaling") {
  const double s = 0.5;
  ExtensionMesh mesh{TensorMesh({uniform_axis(-std::numbers::sqrt2, std::numbers::sqrt2, 96)}),
                     geometric_axis_from_zero(2.0 * std::sqrt(1.0 - s), std::pow(2.0, -1.0 / 8), 1e-7)};
  const auto st = solve_extension(harmonic(s, [](double x, double, double z) { return std::exp(x) * (1 + z); }), mesh);
  std::vector<double> zs;
  for (int j = 4; j <= 12; ++j) zs.push_back(std::ldexp(1.0, -j));
  const auto d = dz_decay(st, 0.25, zs);
  CHECK(d.exponent == Approx(1.0 / s - 1.0).epsilon(0.1));
  for (std::size_t i = 1; i < d.value.size(); ++i) CHECK(d.value[i] <= d.value[i - 1]);

  // U = x: the first derivative is 1 and the oscillation grows like sqrt(r).
  const auto lin = solve_extension(harmonic(s, [](double x, double, double) { return x; }), mesh);
  const auto xs = x_derivative_scaling(lin, 0.0, 1, {0.01, 0.02, 0.04, 0.08, 0.16});
  CHECK(xs.exponent == Approx(-0.5).epsilon(0.1));
  CHECK_THROWS_AS((void)x_derivative_scaling(lin, 0.0, 3, {0.1}), std::invalid_argument);
}

TEST_CASE("grid function view") {
  const auto st = solve_extension(eigen_problem(0.5, 1.0, BottomCondition::Neumann), eigen_mesh(0.5, 16));
  const auto g = to_grid_function(st);
  REQUIRE(g.size() == st.U.size());
  for (std::size_t i = 0; i < st.x.size(); ++i)
    for (std::size_t j = 0; j < st.nz(); ++j) CHECK(g[g.mesh().index(i, j)] == st.at(i, j));
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS((void)solve_extension(eigen_problem(0.5, 1.0, BottomCondition::Neumann), eigen_mesh(0.5, 8)),
                  std::invalid_argument);
  auto p = eigen_problem(0.5, 1.0, BottomCondition::Neumann);
  p.s = 1.0;
  CHECK_THROWS((void)solve_extension(p, eigen_mesh(0.5, 16)));
}
