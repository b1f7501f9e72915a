#include "fraclab/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fraclab {

void FractionalSetup::validate() const {
  std::ostringstream err;
  if (!(s > 0.0 && s < 1.0)) err << "s=" << s << " must lie in (0,1); ";
  if (!(lambda > 0.0)) err << "lambda=" << lambda << " must be > 0; ";
  if (!(Lambda >= lambda)) err << "Lambda=" << Lambda << " must be >= lambda; ";
  if (!(alpha > 0.0 && alpha < 1.0)) err << "alpha=" << alpha << " must lie in (0,1); ";
  if (const auto msg = err.str(); !msg.empty()) throw std::invalid_argument(msg);
}

double section_constant(double s) { return std::pow((1.0 - s) / (s * s), s); }
double transform_constant(double s) { return 1.0 / (2.0 * (1.0 - s)); }

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// (1+u)^p - 1 - p u, accurate for small |u|.
double binomial_remainder2(double p, double u) {
  if (std::abs(u) < 1e-3) {
    double term = p * (p - 1.0) / 2.0 * u * u;
    double sum = term;
    for (int k = 3; k < 12; ++k) {
      term *= (p - (k - 1)) / k * u;
      sum += term;
    }
    return sum;
  }
  return std::expm1(p * std::log1p(u)) - p * u;
}

}  // namespace

MAGeometry::MAGeometry(double s)
    : s_(s),
      p_(1.0 / s),
      q_(section_constant(s)),
      c_(transform_constant(s)),
      coef_h_(s * s / (1.0 - s)),
      coef_dh_(s / (1.0 - s)) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("MAGeometry: s must lie in (0,1)");
}

double MAGeometry::h(double z) const noexcept { return coef_h_ * std::pow(std::abs(z), p_); }

double MAGeometry::dh(double z) const noexcept {
  return coef_dh_ * std::pow(std::abs(z), p_ - 1.0) * sign(z);
}

double MAGeometry::d2h(double z) const {
  if (z == 0.0) {
    if (p_ == 2.0) return 1.0;
    throw std::domain_error("h'' is not defined at z = 0 for s != 1/2");
  }
  return std::pow(std::abs(z), p_ - 2.0);
}

double MAGeometry::dh_inverse(double eta) const noexcept {
  return sign(eta) * std::pow(std::abs(eta) / coef_dh_, 1.0 / (p_ - 1.0));
}

double MAGeometry::degenerate_coefficient(double z) const {
  if (z == 0.0) {
    if (p_ == 2.0) return 1.0;
    throw std::domain_error("z^{2-1/s} is not evaluated on {z = 0}");
  }
  return std::pow(std::abs(z), 2.0 - p_);
}

double MAGeometry::delta_h(double z0, double z) const noexcept {
  if (z0 == 0.0) return h(z);
  if (z == z0) return 0.0;
  // Same-sign neighbourhood: factor out h(z0) to avoid cancellation.
  if (sign(z) == sign(z0)) {
    const double u = (z - z0) / z0;
    const double r = binomial_remainder2(p_, u);
    return std::max(0.0, h(z0) * r);
  }
  // Opposite signs: every term is nonnegative.
  return h(z) + (p_ - 1.0) * h(z0) + std::abs(dh(z0)) * std::abs(z);
}

double MAGeometry::dh_difference(double z0, double z) const noexcept {
  if (z0 != 0.0 && sign(z) == sign(z0)) {
    const double u = (z - z0) / z0;
    return dh(z0) * std::expm1((p_ - 1.0) * std::log1p(u));
  }
  return dh(z) - dh(z0);
}

double MAGeometry::delta_phi(std::span<const double> x0, std::span<const double> x) {
  if (x0.size() != x.size()) throw std::invalid_argument("delta_phi: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x0[i];
    acc += d * d;
  }
  return 0.5 * acc;
}

double MAGeometry::delta_Phi(std::span<const double> x0, double z0, std::span<const double> x,
                             double z) const {
  return delta_phi(x0, x) + delta_h(z0, z);
}

double MAGeometry::mu_h(double a, double b) const {
  if (a > b) throw std::invalid_argument("mu_h: expected a <= b");
  return dh(b) - dh(a);
}

double MAGeometry::x_halfwidth(double R) { return std::sqrt(2.0 * R); }

Interval MAGeometry::section(double z0, double R) const {
  if (!(R > 0.0)) throw std::invalid_argument("section: R must be positive");
  if (z0 == 0.0) {
    const double w = q_ * std::pow(R, s_);
    return {-w, w};
  }
  const double span0 = q_ * std::pow(R + std::abs(delta_h(z0, 0.0)), s_) + std::abs(z0);
  auto solve_side = [&](double dir) {
    double inner = z0;
    double outer = z0 + dir * span0;
    // The bracket above is analytic for the far side; the near side is
    // covered by the same width but we double defensively before bisecting.
    int grow = 0;
    while (delta_h(z0, outer) < R) {
      outer = z0 + 2.0 * (outer - z0);
      if (++grow > 200) throw std::runtime_error("section: bracket expansion failed");
    }
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (inner + outer);
      if (delta_h(z0, mid) < R)
        inner = mid;
      else
        outer = mid;
      if (std::abs(outer - inner) <= 1e-14 * std::max(1.0, std::abs(outer))) break;
    }
    return 0.5 * (inner + outer);
  };
  return {solve_side(-1.0), solve_side(+1.0)};
}

std::pair<Vec, double> MAGeometry::scale_point(std::span<const double> x, double z,
                                               double rho) const {
  if (!(rho > 0.0)) throw std::invalid_argument("scale_point: rho must be positive");
  Vec out(x.begin(), x.end());
  for (auto& v : out) v *= rho;
  return {out, std::pow(rho, 2.0 * s_) * z};
}

double MAGeometry::quotient(double z0, double z) const {
  if (z == 0.0 || z == z0) throw std::domain_error("quotient: z must differ from 0 and z0");
  const double num = dh_difference(z0, z);
  return num * num / (d2h(z) * delta_h(z0, z));
}

bool SectionDescriptor::contains(const MAGeometry& g, std::span<const double> x,
                                 double z) const {
  const std::span<const double> c(x0);
  switch (kind) {
    case SectionKind::Section:
      return g.delta_Phi(c, z0, x, z) < R;
    case SectionKind::Cube: {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - c[i];
        if (!(0.5 * d * d < R)) return false;
      }
      return g.delta_h(z0, z) < R;
    }
    case SectionKind::Cylinder:
      return MAGeometry::delta_phi(c, x) < R && g.delta_h(z0, z) < r;
    case SectionKind::Rectangle: {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - c[i];
        if (!(0.5 * d * d < R)) return false;
      }
      return g.delta_h(z0, z) < r;
    }
    case SectionKind::Half:
      return z > 0.0 && MAGeometry::delta_phi(c, x) < R && g.delta_h(z0, z) < r;
    case SectionKind::Trace:
      return z == 0.0 && MAGeometry::delta_phi(c, x) < R;
  }
  return false;
}

}  // namespace fraclab
