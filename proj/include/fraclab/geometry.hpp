#pragma once

#include <span>
#include <utility>
#include <vector>

namespace fraclab {

// Global parameters shared by every experiment.
struct FractionalSetup {
  double s = 0.5;
  double lambda = 1.0;
  double Lambda = 1.0;
  double alpha = 0.5;

  // Throws std::invalid_argument listing every violated range.
  void validate() const;
};

// Section radius constant: S_R(0) = (-q R^s, q R^s) for the z-profile.
double section_constant(double s);
// Constant relating h(z) to the transformed coordinate: h(z) = c y^2 / 2.
double transform_constant(double s);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double length() const { return hi - lo; }
  [[nodiscard]] bool contains(double v) const { return lo < v && v < hi; }
};

using Vec = std::vector<double>;

// Closed-form geometry of Phi(x,z) = |x|^2/2 + h(z) with
// h(z) = s^2/(1-s) |z|^{1/s}.  Immutable; all members are pure.
class MAGeometry {
 public:
  explicit MAGeometry(double s);

  [[nodiscard]] double s() const noexcept { return s_; }
  [[nodiscard]] double q() const noexcept { return q_; }
  [[nodiscard]] double c() const noexcept { return c_; }
  // Exponent of the degenerate coefficient z^{2-1/s}.
  [[nodiscard]] double coefficient_exponent() const noexcept { return 2.0 - p_; }

  [[nodiscard]] double h(double z) const noexcept;
  [[nodiscard]] double dh(double z) const noexcept;
  // Density of mu_h; throws std::domain_error at z = 0 unless s = 1/2.
  [[nodiscard]] double d2h(double z) const;
  // Inverse of dh (odd, monotone).
  [[nodiscard]] double dh_inverse(double eta) const noexcept;
  // z^{2-1/s} for z != 0, i.e. 1/h''(z).
  [[nodiscard]] double degenerate_coefficient(double z) const;

  [[nodiscard]] double delta_h(double z0, double z) const noexcept;
  // dh(z) - dh(z0) without cancellation for nearby arguments.
  [[nodiscard]] double dh_difference(double z0, double z) const noexcept;
  [[nodiscard]] static double delta_phi(std::span<const double> x0, std::span<const double> x);
  [[nodiscard]] double delta_Phi(std::span<const double> x0, double z0, std::span<const double> x,
                                 double z) const;

  // mu_h([a,b]) = h'(b) - h'(a).
  [[nodiscard]] double mu_h(double a, double b) const;
  [[nodiscard]] double mu_h(const Interval& I) const { return mu_h(I.lo, I.hi); }

  // {z : delta_h(z0,z) < R}.
  [[nodiscard]] Interval section(double z0, double R) const;
  // Half-width of the x-section of radius R (one coordinate).
  [[nodiscard]] static double x_halfwidth(double R);

  [[nodiscard]] std::pair<Vec, double> scale_point(std::span<const double> x, double z,
                                                   double rho) const;

  // (h'(z)-h'(z0))^2 / (h''(z) delta_h(z0,z)) for z != 0, z != z0.
  [[nodiscard]] double quotient(double z0, double z) const;

 private:
  double s_;
  double p_;  // 1/s
  double q_;
  double c_;
  double coef_h_;   // s^2/(1-s)
  double coef_dh_;  // s/(1-s)
};

enum class SectionKind { Section, Cube, Cylinder, Rectangle, Half, Trace };

// Membership descriptor for the sets generated by Phi.  Cylinders and
// rectangles take an x-radius R and a z-radius r; a Half set is the z>0 part
// of a section; a Trace set is S_R(x0) x {0}.
struct SectionDescriptor {
  SectionKind kind = SectionKind::Section;
  Vec x0;
  double z0 = 0.0;
  double R = 1.0;
  double r = 1.0;

  [[nodiscard]] bool contains(const MAGeometry& g, std::span<const double> x, double z) const;
};

}  // namespace fraclab
