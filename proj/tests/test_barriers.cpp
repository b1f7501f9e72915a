#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fraclab/barriers.hpp"

using namespace fraclab;
using doctest::Approx;

namespace {

BarrierSpec fixture(const MAGeometry& g, double R, double rho, double alpha) {
  BarrierSpec spec;
  spec.x0 = {0.0};
  spec.R = R;
  spec.rho = rho;
  spec.z0 = touching_center(g, R);
  spec.alpha = alpha;
  return spec;
}

// Delta_x phi + |z|^{2-1/s} d_zz phi by central differences.
template <class Barrier>
double operator_fd(const Barrier& b, double s, double x, double z, double step) {
  auto v = [&](double xx, double zz) {
    const double p[1] = {xx};
    return b.value(p, zz);
  };
  const double c = v(x, z);
  const double dxx = (v(x + step, z) - 2 * c + v(x - step, z)) / (step * step);
  const double hz = step * z;
  const double dzz = (v(x, z + hz) - 2 * c + v(x, z - hz)) / (hz * hz);
  return dxx + std::pow(z, 2 - 1 / s) * dzz;
}

}  // namespace

TEST_CASE("touching centre") {
  for (double s : {0.25, 0.5, 0.75}) {
    const MAGeometry g(s);
    for (double R : {0.1, 0.5, 2.0}) {
      const double z0 = touching_center(g, R);
      CHECK(z0 > 0.0);
      CHECK(g.delta_h(z0, 0.0) == Approx(R).epsilon(1e-12));
      CHECK(g.section(z0, R).lo == Approx(0.0).scale(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("first-case barrier: values, closed-form operator and trace slope") {
  for (double s : {0.25, 0.5}) {
    CAPTURE(s);
    const MAGeometry g(s);
    const auto spec = fixture(g, 0.5, 0.25, 12.0);
    const CaseOneBarrier b(g, spec);
    const double centre[1] = {0.0};
    CHECK(b.value(centre, spec.z0) == Approx(1 - std::exp(-spec.alpha * spec.R)).epsilon(1e-14));
    // Zero on the outer boundary, both along z and along x.
    const auto I = g.section(spec.z0, spec.R);
    CHECK(std::abs(b.value(centre, I.hi)) < 1e-12);
    CHECK(std::abs(b.value(centre, 0.0)) < 1e-12);
    const double edge[1] = {std::sqrt(2 * spec.R)};
    CHECK(std::abs(b.value(edge, spec.z0)) < 1e-12);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> X(-0.5, 0.5), Z(0.3 * spec.z0, 1.7 * spec.z0);
    for (int k = 0; k < 50; ++k) {
      const double x = X(rng), z = Z(rng);
      const double p[1] = {x};
      const double L = b.operator_value(p, z);
      CHECK(L == Approx(operator_fd(b, s, x, z, 1e-4)).epsilon(1e-4).scale(1.0));
      const double e = spec.alpha * std::exp(-spec.alpha * g.delta_Phi(spec.x0, spec.z0, p, z));
      CHECK(L == Approx(e * b.bracket(p, z)).epsilon(1e-12).scale(1e-12));
    }
    const double eta = 1e-7;
    const double fd = (b.value(centre, eta) - b.value(centre, 0.0)) / eta;
    CHECK(b.dz_at_trace() == Approx(spec.alpha * g.dh(spec.z0) * std::exp(-spec.alpha * spec.R)).epsilon(1e-14));
    CHECK(fd == Approx(b.dz_at_trace()).epsilon(1e-3));
  }
}

TEST_CASE("first-case verification") {
  const MAGeometry g(0.5);
  // (n + 1) / rho is the floor for alpha; well above it the annulus is positive.
  const auto good = CaseOneBarrier(g, fixture(g, 0.5, 0.25, 18.0)).verify(10000, 7);
  CHECK(good.annulus_samples == 10000);
  CHECK(good.annulus_positive);
  CHECK(good.min_bracket > 0.0);
  CHECK(good.dz_at_trace > 0.0);
  CHECK(good.inner_min > 0.0);
  CHECK(std::abs(good.outer_max) < 1e-12);
  CHECK(good.passed);
  CHECK_THROWS_AS((void)CaseOneBarrier(g, fixture(g, 0.5, 0.25, 1.0)), std::invalid_argument);
  // Near the floor the verdict must follow the predicates it reports.
  const auto near = CaseOneBarrier(g, fixture(g, 0.5, 0.25, 8.5)).verify(10000, 7);
  CHECK(near.annulus_positive == (near.min_bracket > 0.0));
  CHECK(near.passed == (near.annulus_positive && near.dz_at_trace > 0.0 && near.inner_min > 0.0));
  // Same seed, same verdict.
  const auto again = CaseOneBarrier(g, fixture(g, 0.5, 0.25, 18.0)).verify(10000, 7);
  CHECK(again.min_bracket == good.min_bracket);
}

TEST_CASE("second-case profile") {
  const MAGeometry g(0.75);
  const double eps = 0.1;
  const CaseTwoBarrier b(g, fixture(g, 0.5, 0.125, 40.0), eps);
  const auto& p = b.profile();
  CHECK(p.z_bump > 0.0);
  CHECK(p.z_bump < p.z_support);
  CHECK(p.z_support <= p.z_top);
  CHECK(p.z_top == Approx(g.section(touching_center(g, 0.5), 0.5).hi).epsilon(1e-12));
  CHECK(p.mu == Approx(g.dh(p.z_top)).epsilon(1e-10));

  CHECK(b.psi(0.5 * p.z_bump) == 1.0);
  CHECK(b.psi(0.5 * (p.z_support + p.z_top)) == Approx(eps));
  for (double z = 0.0; z < p.z_top; z += p.z_top / 300) {
    CHECK(b.psi(z) <= 1.0);
    CHECK(b.psi(z) >= eps - 1e-15);
    CHECK(b.psi(z + p.z_top / 600) <= b.psi(z) + 1e-15);
  }
  // Equal thirds of the mass budget: at most 3 eps mu_h(S_R).
  CHECK(p.psi_mass_ratio <= 3.0 + 1e-9);
  CHECK(b.psi_measure(p.z_top) == Approx(p.psi_mass_ratio * eps * p.mu).epsilon(1e-8));
  CHECK(b.psi_measure(p.z_bump) == Approx(eps * p.mu).epsilon(1e-8));

  CHECK(std::abs(b.h_eps(0.0)) < 1e-12);
  CHECK(std::abs(b.h_eps(p.z_top)) < 1e-12 * (1 + p.C2_hat));
  // h_eps'' = 2 (n + 1) psi h''.
  for (double t : {0.1, 0.35, 0.6, 0.9}) {
    const double z = t * p.z_top, dz = 1e-4 * p.z_top;
    const double second = (b.dh_eps(z + dz) - b.dh_eps(z - dz)) / (2 * dz);
    CHECK(second == Approx(4.0 * b.psi(z) * g.d2h(z)).epsilon(1e-4));
    const double first = (b.h_eps(z + dz) - b.h_eps(z - dz)) / (2 * dz);
    CHECK(first == Approx(b.dh_eps(z)).epsilon(1e-6).scale(1.0));
  }
  CHECK(b.dh_eps(0.0) == Approx(p.slope));
}

TEST_CASE("second-case search passes all predicates") {
  const MAGeometry g(0.75);
  const auto r = search_case_two(g, fixture(g, 0.5, 0.125, 0.0), 10000, 5);
  REQUIRE(r.found);
  CHECK(r.tried >= 1);
  CHECK(r.verification.annulus_positive);
  CHECK(r.verification.dz_at_trace > 0.0);
  CHECK(r.verification.inner_min > 0.0);
  CHECK(std::abs(r.verification.outer_max) < 1e-12);
  CHECK(r.alpha >= 2.0 / 0.125);
  // The recorded pair verifies again with an independent sample.
  auto spec = fixture(g, 0.5, 0.125, r.alpha);
  CHECK(CaseTwoBarrier(g, spec, r.eps).verify(10000, 99).passed);
}

TEST_CASE("barrier validation") {
  CHECK_THROWS((void)CaseOneBarrier(MAGeometry(0.75), fixture(MAGeometry(0.75), 0.5, 0.25, 9.0)));
  CHECK_THROWS((void)CaseTwoBarrier(MAGeometry(0.25), fixture(MAGeometry(0.25), 0.5, 0.25, 9.0), 0.1));
  const MAGeometry g(0.5);
  CHECK_THROWS((void)CaseOneBarrier(g, fixture(g, 0.5, 0.6, 9.0)));
}
