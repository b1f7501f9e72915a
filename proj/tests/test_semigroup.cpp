#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fraclab/grid_function.hpp"
#include "fraclab/semigroup.hpp"
#include "fraclab/stencil.hpp"

using namespace fraclab;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

TensorMesh line(std::size_t cells) { return TensorMesh({uniform_axis(0.0, pi, cells)}); }

GridFunction sine(const TensorMesh& m, double k) {
  return GridFunction::sample_dirichlet(m, [k](double x, double) { return std::sin(k * x); });
}

double rel_sup(const GridFunction& a, const GridFunction& b, double scale) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e / scale;
}

// Independent reference for (1/Gamma(-s)) int_0^inf (e^{-lambda t} - 1) t^{-1-s} dt.
double balakrishnan_oracle(double lambda, double s) {
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  // Near 0 the integrand is -lambda t^{-s} to leading order.
  auto f = [&](double t) {
    return t < 1e-100 ? -lambda * std::pow(t, -s) : std::expm1(-lambda * t) * std::pow(t, -1.0 - s);
  };
  return (near.integrate(f, 0.0, 1.0) + far.integrate(f, 1.0, std::numeric_limits<double>::infinity())) /
         boost::math::tgamma(-s);
}

// (s^{2s} z / Gamma(s)) int e^{-s^2 z^{1/s}/t} e^{-lambda t} t^{-1-s} dt by adaptive quadrature.
double profile_oracle(double lambda, double s, double z) {
  boost::math::quadrature::exp_sinh<double> q;
  const double a = s * s * std::pow(z, 1.0 / s);
  auto f = [&](double t) { return std::exp(-a / t - lambda * t) * std::pow(t, -1.0 - s); };
  return std::pow(s, 2 * s) * z / std::tgamma(s) * q.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("trace constant and Gamma(-s)") {
  CHECK(ds_constant(0.5) == 1.0);
  const long double ref = std::sqrt(0.25L) * boost::math::tgamma(0.75L) / boost::math::tgamma(1.25L);
  CHECK(ds_constant(0.25) == Approx(static_cast<double>(ref)).epsilon(1e-14));
  for (double s : {0.1, 0.3, 0.6, 0.9}) {
    CHECK(ds_constant(s) > 0.0);
    CHECK(gamma_negative(s) < 0.0);
    CHECK(gamma_negative(s) == Approx(boost::math::tgamma(-s)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(ds_constant(1.0), std::invalid_argument);
}

TEST_CASE("quadrature rule") {
  QuadratureSpec bad;
  bad.t_min = 10.0;
  bad.t_max = 1.0;
  CHECK_THROWS(bad.validate());
  const auto rule = make_rule({});
  CHECK(rule.t.front() == Approx(1e-8));
  CHECK(rule.t.back() == Approx(1e4));
  const double exact = 2.0 * (std::sqrt(1e4) - std::sqrt(1e-8));
  auto error = [&](std::size_t nodes) {
    QuadratureSpec q;
    q.nodes = nodes;
    const auto r = make_rule(q);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.t.size(); ++j) acc += r.w[j] * std::pow(r.t[j], -0.5);
    return std::abs(acc - exact) / exact;
  };
  CHECK(error(rule.t.size()) < 1e-4);
  // Gregory-corrected trapezoid: fourth order in the log step.
  const double rate = std::log2(error(96) / error(191));
  CHECK(rate > 3.5);
  CHECK(rate < 4.5);
}

TEST_CASE("scalar Balakrishnan rules against adaptive quadrature") {
  CHECK(scalar_fractional(4.0, 0.5) == Approx(2.0).epsilon(1e-6));
  for (double s : {0.25, 0.5, 0.75})
    for (double lambda : {1.0, 4.0, 9.0}) {
      CHECK(balakrishnan_oracle(lambda, s) == Approx(std::pow(lambda, s)).epsilon(1e-9));
      CHECK(scalar_fractional(lambda, s) == Approx(std::pow(lambda, s)).epsilon(1e-6));
      CHECK(scalar_inverse(lambda, s) == Approx(std::pow(lambda, -s)).epsilon(1e-6));
      for (double z : {0.05, 0.5, 2.0})
        CHECK(scalar_extension_profile(lambda, s, z) == Approx(profile_oracle(lambda, s, z)).epsilon(1e-6));
    }
}

TEST_CASE("stencil is exact on quadratics and flags nonmonotone mixed terms") {
  const TensorMesh m({power_axis(1.0, 12, 1.7), uniform_axis(-1.0, 1.0, 9)});
  const auto a = CoefficientField::constant(2, {1.5, 0.4, 1.0}, 0.5, 2.0);
  const auto st = assemble_stencil(m, a);
  const auto u = GridFunction::sample(m, [](double x, double y) { return x * x - 2 * x * y + 3 * y * y + x; });
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!m.is_boundary(i)) CHECK(st.apply(i, u.values()) == Approx(1.5 * 2 + 2 * 0.4 * (-2) + 1.0 * 6).epsilon(1e-9));
  // Strong grading with a mixed term leaves the seven-point cone.
  CHECK_FALSE(st.monotone);
  CHECK(st.nonmonotone_nodes > 0);
  const TensorMesh square({uniform_axis(0, 1, 8), uniform_axis(0, 1, 8)});
  CHECK(assemble_stencil(square, a).monotone);
  const auto wild = CoefficientField::constant(2, {1.0, 0.95, 0.2}, 0.01, 2.0);
  CHECK_FALSE(assemble_stencil(TensorMesh({uniform_axis(0, 1, 8), uniform_axis(0, 1, 8)}), wild).monotone);
  const auto bad = CoefficientField::constant(2, {1.0, 0.0, 5.0}, 1.0, 2.0);
  CHECK_THROWS_AS(bad.check_ellipticity(m), std::invalid_argument);
}

TEST_CASE("heat semigroup") {
  const auto m = line(256);
  const double dx = pi / 256;
  const SemigroupStepper cn(m, CoefficientField::identity(1));
  const SemigroupStepper ie(m, CoefficientField::identity(1), Integrator::ImplicitEuler, 1e-4);
  const auto u = sine(m, 3.0);
  SUBCASE("t = 0 is the identity") { CHECK(rel_sup(cn.heat_apply(u, 0.0), u, 1.0) == 0.0); }
  SUBCASE("eigenfunction decay") {
    const double lam = discrete_laplacian_eigenvalue(3.0, dx);
    CHECK(lam == Approx(9.0).epsilon(1e-3));
    for (double t : {0.01, 0.1, 0.5}) {
      // Amplification factors of the two integrators on the discrete eigenvector.
      const double n_cn = std::ceil(t / 1e-3), n_ie = std::ceil(t / 1e-4);
      const double dt_cn = t / n_cn, dt_ie = t / n_ie;
      const double g_cn = std::pow((1 - lam * dt_cn / 2) / (1 + lam * dt_cn / 2), n_cn);
      const double g_ie = std::pow(1 / (1 + lam * dt_ie), n_ie);
      GridFunction ref(m), ref_ie(m), ref_exact(m);
      for (std::size_t i = 0; i < m.size(); ++i) {
        ref[i] = g_cn * u[i];
        ref_ie[i] = g_ie * u[i];
        ref_exact[i] = std::exp(-9.0 * t) * u[i];
      }
      CHECK(rel_sup(cn.heat_apply(u, t), ref, g_cn) < 1e-10);
      CHECK(rel_sup(ie.heat_apply(u, t), ref_ie, g_ie) < 1e-10);
      // Against the continuous solution: O(dx^2) + O(dt^2).
      CHECK(rel_sup(cn.heat_apply(u, t), ref_exact, std::exp(-9.0 * t)) < 1e-3);
    }
  }
  SUBCASE("positivity and boundedness of implicit Euler") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    GridFunction v(m);
    for (std::size_t i = 1; i + 1 < m.size(); ++i) v[i] = U(rng);
    CHECK(ie.monotone());
    for (double t : {1e-5, 1e-3, 0.1, 1.0}) {
      const auto w = ie.heat_apply(v, t);
      for (std::size_t i = 0; i < m.size(); ++i) CHECK(w[i] >= -1e-12);
      CHECK(w.max_abs() <= v.max_abs() + 1e-14);
    }
  }
  SUBCASE("semigroup property with aligned substeps") {
    const auto a = cn.heat_apply_steps(cn.heat_apply_steps(u, 0.02, 4), 0.03, 6);
    const auto b = cn.heat_apply_steps(u, 0.05, 10);
    CHECK(rel_sup(a, b, 1.0) < 1e-13);
    const auto ladder = cn.heat_ladder(u, {0.01, 0.02, 0.05}, 4);
    CHECK(rel_sup(ladder[1], cn.heat_apply_steps(u, 0.02, 8), 1.0) < 1e-13);
  }
  GridFunction nonzero_edge(m, 1.0);
  CHECK_THROWS((void)cn.heat_apply(nonzero_edge, 0.1));
}

TEST_CASE("fractional powers of eigenfunctions") {
  const auto m = line(512);
  const SemigroupStepper L(m, CoefficientField::identity(1));
  for (double s : {0.25, 0.5, 0.75}) {
    for (double k : {1.0, 2.0, 4.0}) {
      const auto u = sine(m, k);
      const auto Ls = fractional_apply(L, u, s);
      GridFunction ref(m);
      for (std::size_t i = 0; i < m.size(); ++i) ref[i] = std::pow(k, 2 * s) * u[i];
      CHECK(rel_sup(Ls.value, ref, std::pow(k, 2 * s)) < 1e-3);
      const auto inv = fractional_inverse(L, u, s);
      for (std::size_t i = 0; i < m.size(); ++i) ref[i] = std::pow(k, -2 * s) * u[i];
      CHECK(rel_sup(inv.value, ref, std::pow(k, -2 * s)) < 1e-3);
      const auto back = fractional_apply(L, inv.value, s);
      CHECK(rel_sup(back.value, u, 1.0) < 1e-3);
    }
    const GridFunction zero(m);
    CHECK(fractional_apply(L, zero, s).value.max_abs() == 0.0);
    CHECK(fractional_inverse(L, zero, s).value.max_abs() == 0.0);
  }
}

TEST_CASE("extension through the semigroup") {
  const auto m = line(256);
  const double dx = pi / 256;
  const SemigroupStepper L(m, CoefficientField::identity(1));
  for (double s : {0.25, 0.5, 0.75}) {
    const double k = 2.0, lam = discrete_laplacian_eigenvalue(k, dx);
    const auto u = sine(m, k);
    const std::vector<double> zs{1e-6, 0.1, 0.7};
    const auto slices = extension_via_semigroup(L, u, s, zs);
    for (std::size_t j = 0; j < zs.size(); ++j) {
      const double profile = profile_oracle(lam, s, zs[j]);
      GridFunction ref(m);
      for (std::size_t i = 0; i < m.size(); ++i) ref[i] = profile * u[i];
      CHECK(rel_sup(slices.values[j], ref, 1.0) < 1e-4);
    }
    // z -> 0: approximate identity.
    CHECK(rel_sup(slices.values[0], u, 1.0) < 1e-3);
    // Continuous-k closed form 2^{1-s}/Gamma(s) (ky)^s K_s(ky).
    const double z = 0.7, y = 2 * s * std::pow(z, 1 / (2 * s));
    const double closed = std::pow(2.0, 1 - s) / std::tgamma(s) * std::pow(k * y, s) * boost::math::cyl_bessel_k(s, k * y);
    CHECK(profile_oracle(k * k, s, z) == Approx(closed).epsilon(1e-8));

    // Slope: (U(z) - u)/z -> -d_s lambda^s, with next term of order z^{1/s - 1}.
    // Moderate z keeps the increment well above the quadrature error.
    const double p = 1.0 / s - 1.0, z1 = 0.02, z2 = z1 / 2;
    const std::size_t mid = 256 / 4;  // sin(2x) = 1 at x = pi/4
    const auto v = extension_via_semigroup(L, u, s, std::vector<double>{z1, z2});
    const double d1 = (v.values[0][mid] - u[mid]) / z1, d2 = (v.values[1][mid] - u[mid]) / z2;
    const double extrapolated = (std::pow(2.0, p) * d2 - d1) / (std::pow(2.0, p) - 1.0);
    INFO("s = ", s, " d1 = ", d1, " d2 = ", d2);
    CHECK(extrapolated == Approx(-ds_constant(s) * std::pow(lam, s)).epsilon(0.01));
  }
  CHECK_THROWS((void)extension_via_semigroup(L, sine(m, 1.0), 0.5, 0.0));
}

TEST_CASE("grid function persistence round-trips exactly") {
  const TensorMesh m({geometric_axis_symmetric(1.0, 0.8, 1e-3), power_axis(2.0, 7, 1.5)});
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  GridFunction u(m);
  for (auto& v : u.values()) v = N(rng);
  std::stringstream ss;
  write_csv(ss, u);
  const auto back = read_csv(ss);
  CHECK(back.mesh() == m);
  CHECK(back.values() == u.values());

  const auto dir = std::filesystem::temp_directory_path() / "fraclab-grid-test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "u.frlgrid").string();
  write_binary_grid(path, {{m.axis(0), m.axis(1)}, u.values()});
  const auto g = read_binary_grid(path);
  CHECK(g.axes.size() == 2);
  CHECK(g.axes[0] == m.axis(0));
  CHECK(g.axes[1] == m.axis(1));
  CHECK(g.values == u.values());
  // Header layout: magic then axis count and dtype.
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::string(magic, 8) == "FRLGRID1");
  std::uint32_t d = 0, dtype = 0;
  in.read(reinterpret_cast<char*>(&d), 4);
  in.read(reinterpret_cast<char*>(&dtype), 4);
  CHECK(d == 2);
  CHECK(dtype == 1);
}
