#pragma once

#include <cstdint>
#include <vector>

#include "fraclab/geometry.hpp"

namespace fraclab {

// Shared parameters: barrier centred at (x0, z0) with z0 > 0 and outer radius
// R = delta_h(z0, 0), so the outer section touches {z = 0} at (x0, 0).
struct BarrierSpec {
  Vec x0{0.0};
  double z0 = 1.0;
  double R = 0.5;
  double rho = 0.25;
  double alpha = 9.0;
};

// Outcome of the sampled predicates on A = S_R \ S_rho.
struct BarrierVerification {
  std::size_t annulus_samples = 0;
  // Smallest operator value divided by its positive exponential factor.
  double min_bracket = 0.0;
  bool annulus_positive = false;
  double dz_at_trace = 0.0;  // e^{alpha R} d_z phi(x0, 0)
  // phi on the sampled boundaries of S_rho and S_R.
  double inner_min = 0.0, inner_max = 0.0;
  double outer_max = 0.0;
  bool passed = false;
};

// phi = e^{-alpha delta_Phi((x0,z0),(x,z))} - e^{-alpha R}, for 0 < s <= 1/2.
class CaseOneBarrier {
 public:
  CaseOneBarrier(const MAGeometry& g, BarrierSpec spec);

  [[nodiscard]] const BarrierSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] double value(std::span<const double> x, double z) const;
  // Delta_x phi + z^{2-1/s} d_zz phi, closed form.
  [[nodiscard]] double operator_value(std::span<const double> x, double z) const;
  // Bracket b with operator_value = alpha e^{-alpha delta_Phi} b.
  [[nodiscard]] double bracket(std::span<const double> x, double z) const;
  [[nodiscard]] double dz_at_trace() const;  // alpha h'(z0) e^{-alpha R}

  [[nodiscard]] BarrierVerification verify(std::size_t samples, std::uint64_t seed) const;

 private:
  MAGeometry g_;
  BarrierSpec spec_;
};

// Bump psi and corrector h_eps on S_R(z0) = (0, z_top) for 1/2 < s < 1.
// psi = 1 on (0, z_bump], decreases by a quintic smoothstep over
// [z_bump, z_bump + width] and equals eps afterwards; z_bump and the end of
// the support set are fixed by mu_h((0, z_bump]) = mu_h(support \ (0, z_bump])
// = eps mu_h(S_R(z0)).  h_eps'' = 2(n+1) psi h'' with zero boundary values.
struct CaseTwoProfile {
  double s = 0.75;
  int n = 1;
  double eps = 0.1;
  double z_top = 0.0;
  double z_bump = 0.0;
  double z_support = 0.0;
  double width = 0.0;
  double mu = 0.0;    // mu_h(S_R(z0))
  double slope = 0.0; // h_eps'(0)
  std::vector<double> z, psi, h_eps, dh_eps;  // samples for reporting
  double C2_hat = 0.0;        // max |h_eps| / (eps R)
  double C1_hat = 0.0;        // |h_eps'(0)| / (eps mu)
  double psi_mass_ratio = 0.0;  // int psi d mu_h / (eps mu)
};

class CaseTwoBarrier {
 public:
  // `n` is the lateral dimension; spec.alpha is used as given.
  CaseTwoBarrier(const MAGeometry& g, BarrierSpec spec, double eps, std::size_t profile_samples = 257);

  [[nodiscard]] const BarrierSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const CaseTwoProfile& profile() const noexcept { return prof_; }
  [[nodiscard]] double psi(double z) const;
  [[nodiscard]] double h_eps(double z) const;
  [[nodiscard]] double dh_eps(double z) const;
  // Integral of psi h'' over (0, z).
  [[nodiscard]] double psi_measure(double z) const;

  [[nodiscard]] double value(std::span<const double> x, double z) const;
  [[nodiscard]] double operator_value(std::span<const double> x, double z) const;
  [[nodiscard]] double bracket(std::span<const double> x, double z) const;

  [[nodiscard]] BarrierVerification verify(std::size_t samples, std::uint64_t seed) const;

 private:
  // Integral of (z - w) chi(w) h''(w) over (0, z), chi = (psi - eps)/(1 - eps).
  [[nodiscard]] double chi_moment(double z) const;
  [[nodiscard]] double chi_measure(double z) const;
  [[nodiscard]] double chi(double z) const;
  void tabulate_transition();
  [[nodiscard]] double gauss_piece(double a, double b, int power) const;
  [[nodiscard]] double transition_moment(double z, int power) const;

  // Cumulative moments of chi h'' on a fixed partition of the transition.
  struct Transition {
    std::vector<double> nodes, m0, m1;
  };

  MAGeometry g_;
  BarrierSpec spec_;
  CaseTwoProfile prof_;
  Transition transition_;
};

struct CaseTwoSearch {
  bool found = false;
  double eps = 0.0;
  double alpha = 0.0;
  std::size_t tried = 0;
  BarrierVerification verification;
};

// Geometric sweep over eps (halving from eps_start) and alpha (doubling from
// the smallest admissible value (n+1)/rho); first passing pair wins.
CaseTwoSearch search_case_two(const MAGeometry& g, BarrierSpec spec, std::size_t samples,
                              std::uint64_t seed, double eps_start = 0.25, int eps_steps = 12,
                              int alpha_steps = 24);

// z0 > 0 with delta_h(z0, 0) = R.
double touching_center(const MAGeometry& g, double R);

}  // namespace fraclab
