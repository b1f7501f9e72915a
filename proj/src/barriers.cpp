#include "fraclab/barriers.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fraclab/mesh.hpp"

namespace fraclab {

double touching_center(const MAGeometry& g, double R) { return std::pow(R / g.s(), g.s()); }

namespace {

void check_spec(const MAGeometry& g, const BarrierSpec& b) {
  std::ostringstream err;
  const double n = static_cast<double>(b.x0.size());
  if (b.x0.empty() || b.x0.size() > 2) err << "x0 must have 1 or 2 coordinates; ";
  if (!(b.z0 > 0.0)) err << "z0 must be > 0; ";
  if (!(b.rho > 0.0 && b.rho < b.R)) err << "need 0 < rho < R; ";
  if (!(b.alpha > (n + 1.0) / b.rho)) err << "alpha must exceed (n+1)/rho = " << (n + 1.0) / b.rho << "; ";
  if (b.z0 > 0.0) {
    const double touch = g.delta_h(b.z0, 0.0);
    if (std::abs(touch - b.R) > 1e-10 * b.R)
      err << "R must equal delta_h(z0,0) = " << touch << "; ";
  }
  if (const auto msg = err.str(); !msg.empty()) throw std::invalid_argument("barrier: " + msg);
}

double delta_x(const Vec& x0, std::span<const double> x) { return MAGeometry::delta_phi(x0, x); }

// Points on {delta_phi(x0,x) = t r, delta_h(z0,z) = (1-t) r}.
template <class F>
void sample_boundary(const MAGeometry& g, const BarrierSpec& b, double r, std::size_t count, std::mt19937_64& rng,
                     F&& visit) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t n = b.x0.size();
  Vec x(n);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(count - 1, 1));
    const double rad = std::sqrt(2.0 * t * r);
    const double ang = 2.0 * M_PI * U(rng);
    if (n == 1) x[0] = b.x0[0] + (U(rng) < 0.5 ? -rad : rad);
    else {
      x[0] = b.x0[0] + rad * std::cos(ang);
      x[1] = b.x0[1] + rad * std::sin(ang);
    }
    const double rz = (1.0 - t) * r;
    if (rz <= 0.0) {
      visit(std::span<const double>(x), b.z0);
      continue;
    }
    const Interval I = g.section(b.z0, rz);
    visit(std::span<const double>(x), std::max(I.lo, 0.0));
    visit(std::span<const double>(x), I.hi);
  }
}

// Shared verification driver.  `G` is the exponent function, `bracket` the
// operator bracket, `dz` the scaled trace derivative.
template <class Gf, class Bf>
BarrierVerification verify_common(const MAGeometry& g, const BarrierSpec& b, Gf&& G, Bf&& bracket, double dz,
                                  std::size_t samples, std::uint64_t seed) {
  BarrierVerification v;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t n = b.x0.size();
  const double hw = MAGeometry::x_halfwidth(b.R);
  const Interval Iz = g.section(b.z0, b.R);
  const double zlo = std::max(Iz.lo, 0.0);
  Vec x(n);
  v.min_bracket = INFINITY;
  std::size_t attempts = 0;
  while (v.annulus_samples < samples) {
    if (++attempts > 1000 * samples) throw std::runtime_error("barrier verify: annulus sampling stalled");
    for (std::size_t i = 0; i < n; ++i) x[i] = b.x0[i] + hw * (2.0 * U(rng) - 1.0);
    const double z = zlo + (Iz.hi - zlo) * U(rng);
    if (!(z > 0.0)) continue;
    const double d = delta_x(b.x0, x) + g.delta_h(b.z0, z);
    if (d < b.rho || d >= b.R) continue;
    v.min_bracket = std::min(v.min_bracket, bracket(std::span<const double>(x), z));
    ++v.annulus_samples;
  }
  v.annulus_positive = v.min_bracket > 0.0;
  v.dz_at_trace = dz;

  double margin = INFINITY;
  v.inner_min = INFINITY;
  v.inner_max = -INFINITY;
  const std::size_t nb = std::max<std::size_t>(samples / 10, 16);
  sample_boundary(g, b, b.rho, nb, rng, [&](std::span<const double> xx, double z) {
    const double e = G(xx, z);
    margin = std::min(margin, b.R - e);
    const double phi = std::exp(-b.alpha * e) - std::exp(-b.alpha * b.R);
    v.inner_min = std::min(v.inner_min, phi);
    v.inner_max = std::max(v.inner_max, phi);
  });
  v.outer_max = -INFINITY;
  double outer_excess = -INFINITY;
  sample_boundary(g, b, b.R, nb, rng, [&](std::span<const double> xx, double z) {
    const double e = G(xx, z);
    outer_excess = std::max(outer_excess, b.R - e);
    v.outer_max = std::max(v.outer_max, std::exp(-b.alpha * e) - std::exp(-b.alpha * b.R));
  });
  v.passed = v.annulus_positive && v.dz_at_trace > 0.0 && margin > 0.0 && v.inner_max > 0.0 &&
             outer_excess <= 1e-9 * b.R;
  return v;
}

}  // namespace

CaseOneBarrier::CaseOneBarrier(const MAGeometry& g, BarrierSpec spec) : g_(g), spec_(std::move(spec)) {
  if (g.s() > 0.5) throw std::invalid_argument("CaseOneBarrier: requires s <= 1/2");
  check_spec(g_, spec_);
}

double CaseOneBarrier::value(std::span<const double> x, double z) const {
  return std::exp(-spec_.alpha * g_.delta_Phi(spec_.x0, spec_.z0, x, z)) - std::exp(-spec_.alpha * spec_.R);
}

double CaseOneBarrier::bracket(std::span<const double> x, double z) const {
  const double n = static_cast<double>(spec_.x0.size());
  const double dd = g_.dh_difference(spec_.z0, z);
  const double vertical = z == 0.0 ? (g_.s() == 0.5 ? dd * dd : INFINITY) : dd * dd / g_.d2h(z);
  return spec_.alpha * (2.0 * delta_x(spec_.x0, x) + vertical) - (n + 1.0);
}

double CaseOneBarrier::operator_value(std::span<const double> x, double z) const {
  return spec_.alpha * std::exp(-spec_.alpha * g_.delta_Phi(spec_.x0, spec_.z0, x, z)) * bracket(x, z);
}

double CaseOneBarrier::dz_at_trace() const {
  return spec_.alpha * g_.dh(spec_.z0) * std::exp(-spec_.alpha * spec_.R);
}

BarrierVerification CaseOneBarrier::verify(std::size_t samples, std::uint64_t seed) const {
  return verify_common(
      g_, spec_, [&](std::span<const double> x, double z) { return g_.delta_Phi(spec_.x0, spec_.z0, x, z); },
      [&](std::span<const double> x, double z) { return bracket(x, z); }, spec_.alpha * g_.dh(spec_.z0), samples,
      seed);
}

namespace {

double smoothstep5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }

}  // namespace

CaseTwoBarrier::CaseTwoBarrier(const MAGeometry& g, BarrierSpec spec, double eps, std::size_t samples)
    : g_(g), spec_(std::move(spec)) {
  if (g.s() <= 0.5) throw std::invalid_argument("CaseTwoBarrier: requires 1/2 < s < 1");
  check_spec(g_, spec_);
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("CaseTwoBarrier: eps must lie in (0, 1/2)");
  auto& p = prof_;
  p.s = g.s();
  p.n = static_cast<int>(spec_.x0.size());
  p.eps = eps;
  p.z_top = g.section(spec_.z0, spec_.R).hi;
  p.mu = g.dh(p.z_top);
  p.z_bump = g.dh_inverse(eps * p.mu);
  p.z_support = g.dh_inverse(2.0 * eps * p.mu);
  p.width = 0.1 * (p.z_support - p.z_bump);
  if (!(p.z_support < p.z_top)) throw std::invalid_argument("CaseTwoBarrier: eps too large for the section");
  tabulate_transition();
  const double k = 2.0 * (p.n + 1.0);
  p.slope = -k * (eps * g.h(p.z_top) + (1.0 - eps) * chi_moment(p.z_top)) / p.z_top;

  samples = std::max<std::size_t>(samples, 3);
  double hmax = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double z = p.z_top * static_cast<double>(i) / static_cast<double>(samples - 1);
    p.z.push_back(z);
    p.psi.push_back(psi(z));
    p.h_eps.push_back(h_eps(z));
    p.dh_eps.push_back(dh_eps(z));
    hmax = std::max(hmax, std::abs(p.h_eps.back()));
  }
  p.C2_hat = hmax / (eps * spec_.R);
  p.C1_hat = std::abs(p.slope) / (eps * p.mu);
  p.psi_mass_ratio = psi_measure(p.z_top) / (eps * p.mu);
}

double CaseTwoBarrier::chi(double z) const {
  if (z <= prof_.z_bump) return 1.0;
  const double t = (z - prof_.z_bump) / prof_.width;
  return t >= 1.0 ? 0.0 : 1.0 - smoothstep5(t);
}

void CaseTwoBarrier::tabulate_transition() {
  const std::size_t K = 64;
  auto& T = transition_;
  T.nodes.resize(K + 1);
  T.m0.assign(K + 1, 0.0);
  T.m1.assign(K + 1, 0.0);
  for (std::size_t k = 0; k <= K; ++k)
    T.nodes[k] = prof_.z_bump + prof_.width * static_cast<double>(k) / static_cast<double>(K);
  for (std::size_t k = 0; k < K; ++k) {
    T.m0[k + 1] = T.m0[k] + gauss_piece(T.nodes[k], T.nodes[k + 1], 0);
    T.m1[k + 1] = T.m1[k] + gauss_piece(T.nodes[k], T.nodes[k + 1], 1);
  }
}

double CaseTwoBarrier::gauss_piece(double a, double b, int power) const {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss<double, 10>::integrate(
      [&](double w) { return (power == 1 ? w : 1.0) * chi(w) * g_.d2h(w); }, a, b);
}

// Integral of w^power chi h'' over [z_bump, min(z, z_bump + width)].
double CaseTwoBarrier::transition_moment(double z, int power) const {
  const auto& T = transition_;
  if (z <= T.nodes.front()) return 0.0;
  const auto& cum = power == 1 ? T.m1 : T.m0;
  if (z >= T.nodes.back()) return cum.back();
  const std::size_t k = locate_cell(T.nodes, z);
  return cum[k] + gauss_piece(T.nodes[k], z, power);
}

double CaseTwoBarrier::chi_measure(double z) const {
  return g_.dh(std::min(z, prof_.z_bump)) + transition_moment(z, 0);
}

double CaseTwoBarrier::chi_moment(double z) const {
  const double m = std::min(z, prof_.z_bump);
  return (z - m) * g_.dh(m) + g_.h(m) + z * transition_moment(z, 0) - transition_moment(z, 1);
}

double CaseTwoBarrier::psi(double z) const { return prof_.eps + (1.0 - prof_.eps) * chi(z); }

double CaseTwoBarrier::psi_measure(double z) const {
  return prof_.eps * g_.dh(z) + (1.0 - prof_.eps) * chi_measure(z);
}

double CaseTwoBarrier::h_eps(double z) const {
  const double k = 2.0 * (prof_.n + 1.0);
  return prof_.slope * z + k * (prof_.eps * g_.h(z) + (1.0 - prof_.eps) * chi_moment(z));
}

double CaseTwoBarrier::dh_eps(double z) const { return prof_.slope + 2.0 * (prof_.n + 1.0) * psi_measure(z); }

double CaseTwoBarrier::value(std::span<const double> x, double z) const {
  const double G = g_.delta_Phi(spec_.x0, spec_.z0, x, z) - h_eps(z);
  return std::exp(-spec_.alpha * G) - std::exp(-spec_.alpha * spec_.R);
}

double CaseTwoBarrier::bracket(std::span<const double> x, double z) const {
  const double n = static_cast<double>(prof_.n);
  const double dG = g_.dh_difference(spec_.z0, z) - dh_eps(z);
  const double w = z == 0.0 ? 0.0 : g_.degenerate_coefficient(z);
  return spec_.alpha * (2.0 * delta_x(spec_.x0, x) + w * dG * dG) - (n + 1.0) * (1.0 - 2.0 * psi(z));
}

double CaseTwoBarrier::operator_value(std::span<const double> x, double z) const {
  const double G = g_.delta_Phi(spec_.x0, spec_.z0, x, z) - h_eps(z);
  return spec_.alpha * std::exp(-spec_.alpha * G) * bracket(x, z);
}

BarrierVerification CaseTwoBarrier::verify(std::size_t samples, std::uint64_t seed) const {
  const double dz = spec_.alpha * (g_.dh(spec_.z0) + prof_.slope);
  return verify_common(
      g_, spec_,
      [&](std::span<const double> x, double z) { return g_.delta_Phi(spec_.x0, spec_.z0, x, z) - h_eps(z); },
      [&](std::span<const double> x, double z) { return bracket(x, z); }, dz, samples, seed);
}

CaseTwoSearch search_case_two(const MAGeometry& g, BarrierSpec spec, std::size_t samples, std::uint64_t seed,
                              double eps_start, int eps_steps, int alpha_steps) {
  CaseTwoSearch out;
  const double n = static_cast<double>(spec.x0.size());
  const double alpha0 = 1.01 * (n + 1.0) / spec.rho;
  for (int e = 0; e < eps_steps; ++e) {
    const double eps = eps_start * std::pow(0.5, e);
    for (int a = 0; a < alpha_steps; ++a) {
      spec.alpha = alpha0 * std::pow(2.0, a);
      ++out.tried;
      const CaseTwoBarrier b(g, spec, eps);
      const auto v = b.verify(samples, seed);
      if (v.passed) {
        out.found = true;
        out.eps = eps;
        out.alpha = spec.alpha;
        out.verification = v;
        return out;
      }
      // The trace-slope and inner-boundary predicates do not depend on alpha.
      if (v.annulus_positive && !v.passed) break;
    }
  }
  return out;
}

}  // namespace fraclab
