#include "fraclab/geometry_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fraclab {

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Least-squares slope and intercept of y on x.
std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return {0.0, sy / n};
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

struct EngulfSample {
  double r2, d, t, z0, z1, ratio;  // ratio = largest admissible inner radius / t
};

EngulfingComponent engulf_component(const MAGeometry& g, std::size_t samples,
                                    const SamplingSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<EngulfSample> data;
  data.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double r2 = 0.05 + 0.95 * (1.0 - unit(rng));
    const double d = r2 * std::pow(10.0, -4.0 * (1.0 - unit(rng)));
    if (!(d < r2)) continue;
    const double r1 = r2 - d;
    const double t = log_uniform(rng, spec.radius_min, spec.radius_max);
    const double z0 = (2.0 * unit(rng) - 1.0) * spec.center_box;
    const Interval inner = g.section(z0, r1 * t);
    const double z1 = inner.lo + unit(rng) * inner.length();
    const Interval outer = g.section(z0, r2 * t);
    if (!outer.contains(z1)) continue;
    const double rad = std::min(g.delta_h(z1, outer.lo), g.delta_h(z1, outer.hi));
    data.push_back({r2, d, t, z0, z1, rad / t});
  }
  if (data.empty()) return {};

  // Lower envelope of log(ratio) over decades of log(d).
  const int bins = 16;
  std::vector<double> bx(bins, 0.0), by(bins, std::numeric_limits<double>::infinity());
  for (const auto& e : data) {
    const double ld = std::log10(e.d);
    int b = static_cast<int>(std::floor((ld + 4.0) / 4.0 * bins));
    b = std::clamp(b, 0, bins - 1);
    const double ly = std::log(e.ratio);
    if (ly < by[b]) {
      by[b] = ly;
      bx[b] = std::log(e.d);
    }
  }
  std::vector<double> xs, ys;
  for (int b = 0; b < bins; ++b)
    if (std::isfinite(by[b])) {
      xs.push_back(bx[b]);
      ys.push_back(by[b]);
    }
  double p = xs.size() >= 2 ? ols(xs, ys).first : 1.0;
  p = std::max(1.0, p);
  double C = std::numeric_limits<double>::infinity();
  for (const auto& e : data) C = std::min(C, e.ratio / std::pow(e.d, p));

  // Verify the inclusion at the estimated constants with explicit sections.
  std::size_t violations = 0;
  for (const auto& e : data) {
    const double rad = C * std::pow(e.d, p) * e.t;
    const Interval in = g.section(e.z1, rad);
    const double lim = e.r2 * e.t * (1.0 + 1e-9);
    if (g.delta_h(e.z0, in.lo) > lim || g.delta_h(e.z0, in.hi) > lim) ++violations;
  }
  return {C, p, violations};
}

}  // namespace

EngulfingReport engulfing_check(const MAGeometry& g, std::size_t samples,
                                const SamplingSpec& spec) {
  if (samples < 1) throw std::invalid_argument("engulfing_check: samples must be >= 1");
  // The Euclidean coordinate profile x^2/2 coincides with h at s = 1/2.
  const MAGeometry euclid(0.5);
  EngulfingReport rep;
  rep.samples = samples;
  rep.x = engulf_component(euclid, samples, spec, spec.seed ^ 0x9e3779b97f4a7c15ULL);
  rep.z = engulf_component(g, samples, spec, spec.seed);
  return rep;
}

DoublingReport doubling_check(const MAGeometry& g, const std::vector<DoublingSection>& sections) {
  if (sections.empty()) throw std::invalid_argument("doubling_check: no sections");
  DoublingReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (const auto& sec : sections) {
    const Interval I = g.section(sec.z0, sec.R);
    const double ratio = I.length() * g.mu_h(I) / sec.R;
    rep.ratios.push_back(ratio);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

QuasiTriangleReport quasi_triangle_check(const MAGeometry& g, int dimension, std::size_t samples,
                                         const SamplingSpec& spec) {
  if (dimension < 1) throw std::invalid_argument("quasi_triangle_check: dimension >= 1");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> box(-spec.center_box, spec.center_box);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<std::size_t>(dimension);
  Vec x1(n), x2(n), x3(n);
  QuasiTriangleReport rep;
  rep.dimension = dimension;
  rep.samples = samples;
  auto d = [&](const Vec& a, double za, const Vec& b, double zb) {
    return g.delta_Phi(a, za, b, zb);
  };
  for (std::size_t k = 0; k < samples; ++k) {
    for (auto& v : x1) v = box(rng);
    for (auto& v : x2) v = box(rng);
    const double z1 = box(rng), z2 = box(rng);
    double z3;
    if (k % 2 == 0) {
      // Intermediate points stress the inequality the most.
      const double w = unit(rng);
      for (std::size_t i = 0; i < n; ++i) x3[i] = w * x1[i] + (1 - w) * x2[i];
      z3 = w * z1 + (1 - w) * z2;
    } else {
      for (auto& v : x3) v = box(rng);
      z3 = box(rng);
    }
    const double lhs = d(x1, z1, x2, z2);
    const double rhs = std::min(d(x1, z1, x3, z3), d(x3, z3, x1, z1)) +
                       std::min(d(x2, z2, x3, z3), d(x3, z3, x2, z2));
    if (rhs > 0.0) rep.K_hat = std::max(rep.K_hat, lhs / rhs);
  }
  return rep;
}

namespace {

// Lebesgue measure and mu_h of the heaviest subset of I with prescribed
// length.  The density |z|^{1/s-2} is radial and monotone in |z|, so the
// optimal set is S ∩ {|z| < c} (s > 1/2) or S \ [-c, c] (s < 1/2).
double heaviest_mass(const MAGeometry& g, const Interval& I, double length) {
  const bool inner = g.s() > 0.5;
  auto measure = [&](double c, bool want_mu) {
    // pieces of I that belong to the chosen superlevel set
    double total = 0.0;
    auto add = [&](double a, double b) {
      if (b <= a) return;
      total += want_mu ? g.mu_h(a, b) : (b - a);
    };
    if (inner) {
      add(std::max(I.lo, -c), std::min(I.hi, c));
    } else {
      add(I.lo, std::min(I.hi, -c));
      add(std::max(I.lo, c), I.hi);
    }
    return total;
  };
  const double extent = std::max(std::abs(I.lo), std::abs(I.hi));
  double lo = 0.0, hi = extent;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double len = measure(mid, false);
    // inner: length grows with c; outer: length shrinks with c
    if ((len < length) == inner)
      lo = mid;
    else
      hi = mid;
  }
  return measure(0.5 * (lo + hi), true);
}

}  // namespace

AInfinityReport a_infinity_check(const MAGeometry& g, std::size_t sections, int levels,
                                 const SamplingSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> box(-spec.center_box, spec.center_box);
  std::vector<Interval> secs;
  for (std::size_t k = 0; k < sections; ++k) {
    const double R = log_uniform(rng, spec.radius_min, spec.radius_max);
    secs.push_back(g.section(box(rng), R));
  }
  AInfinityReport rep;
  for (int k = 1; k <= levels; ++k) {
    const double frac = std::ldexp(1.0, -k);
    double worst = 0.0;
    for (const auto& I : secs) {
      const double ratio = heaviest_mass(g, I, frac * I.length()) / g.mu_h(I);
      worst = std::max(worst, ratio);
    }
    rep.length_fraction.push_back(frac);
    rep.worst_mass_fraction.push_back(worst);
  }
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.worst_mass_fraction.size(); ++k)
    if (rep.worst_mass_fraction[k] > rep.worst_mass_fraction[k - 1] * (1 + 1e-12))
      rep.monotone = false;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < rep.length_fraction.size(); ++k) {
    lx.push_back(std::log(rep.length_fraction[k]));
    ly.push_back(std::log(rep.worst_mass_fraction[k]));
  }
  if (lx.size() >= 2) rep.decay_exponent = ols(lx, ly).first;
  return rep;
}

QuotientReport quotient_check(const MAGeometry& g, std::size_t samples, const SamplingSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  QuotientReport rep;
  rep.min_quotient = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double z0 = log_uniform(rng, spec.radius_min, spec.radius_max);
    const double z = z0 * log_uniform(rng, 1e-6, 1e3);
    if (z == z0) continue;
    const double Q = g.quotient(z0, z);
    ++rep.samples;
    if (Q < rep.min_quotient) {
      rep.min_quotient = Q;
      rep.argmin_z = z;
      rep.argmin_z0 = z0;
    }
  }
  return rep;
}

ScalingReport scaling_check(const MAGeometry& g, int dimension, std::size_t samples,
                            const SamplingSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> box(-spec.center_box, spec.center_box);
  const auto n = static_cast<std::size_t>(dimension);
  const double s = g.s();
  ScalingReport rep;
  rep.samples = samples;
  Vec x0(n), x(n);
  for (std::size_t k = 0; k < samples; ++k) {
    const double rho = log_uniform(rng, 1e-2, 1e2);
    const double z = box(rng);
    const double zs = std::pow(rho, 2 * s) * z;
    const double hv = g.h(zs);
    if (hv > 0)
      rep.max_h_error = std::max(rep.max_h_error, std::abs(rho * rho * g.h(z) - hv) / hv);
    const double dv = g.dh(zs);
    if (dv != 0)
      rep.max_dh_error =
          std::max(rep.max_dh_error, std::abs(std::pow(rho, 2 - 2 * s) * g.dh(z) - dv) / std::abs(dv));

    for (auto& v : x0) v = box(rng);
    for (auto& v : x) v = box(rng);
    const double z0 = box(rng);
    const double R = log_uniform(rng, spec.radius_min, spec.radius_max);
    const double r = log_uniform(rng, spec.radius_min, spec.radius_max);
    const bool before = MAGeometry::delta_phi(x0, x) < R && g.delta_h(z0, z) < r;
    auto [sx, sz] = g.scale_point(x, z, rho);
    auto [sx0, sz0] = g.scale_point(x0, z0, rho);
    const bool after =
        MAGeometry::delta_phi(sx0, sx) < rho * rho * R && g.delta_h(sz0, sz) < rho * rho * r;
    if (before != after) ++rep.membership_mismatches;
  }
  return rep;
}

}  // namespace fraclab
