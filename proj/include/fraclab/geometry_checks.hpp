#pragma once

#include <cstdint>
#include <vector>

#include "fraclab/geometry.hpp"

namespace fraclab {

struct SamplingSpec {
  double radius_min = 1e-3;
  double radius_max = 10.0;
  double center_box = 2.0;  // centers uniform in [-box, box]^n
  std::uint64_t seed = 20240601;
};

// Empirical engulfing constants for one 1-D profile.  For every sample the
// largest admissible inner radius is computed exactly from the section
// endpoints; p_hat is the slope of the lower envelope of log(radius/t) vs
// log(r2-r1) and C_hat the matching prefactor.
struct EngulfingComponent {
  double C_hat = 0.0;
  double p_hat = 0.0;
  std::size_t violations = 0;
};

struct EngulfingReport {
  EngulfingComponent x;  // Euclidean cube component, one coordinate
  EngulfingComponent z;  // h-section component
  std::size_t samples = 0;
};

EngulfingReport engulfing_check(const MAGeometry& g, std::size_t samples,
                                const SamplingSpec& spec = {});

struct DoublingSection {
  double z0;
  double R;
};

struct DoublingReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::vector<double> ratios;
};

// |S_R(z0)| mu_h(S_R(z0)) / R per section.
DoublingReport doubling_check(const MAGeometry& g, const std::vector<DoublingSection>& sections);

struct QuasiTriangleReport {
  double K_hat = 0.0;
  std::size_t samples = 0;
  int dimension = 1;
};

QuasiTriangleReport quasi_triangle_check(const MAGeometry& g, int dimension, std::size_t samples,
                                         const SamplingSpec& spec = {});

// For each refinement level k the heaviest union of intervals occupying a
// fraction 2^{-k} of a sampled section is located; the report stores the
// worst mass fraction per level and its log-log decay rate.
struct AInfinityReport {
  std::vector<double> length_fraction;
  std::vector<double> worst_mass_fraction;
  double decay_exponent = 0.0;
  bool monotone = false;
};

AInfinityReport a_infinity_check(const MAGeometry& g, std::size_t sections, int levels,
                                 const SamplingSpec& spec = {});

struct QuotientReport {
  double min_quotient = 0.0;
  double argmin_z = 0.0;
  double argmin_z0 = 0.0;
  std::size_t samples = 0;
};

// Samples z0 > 0 and z > 0 (z != z0) log-uniformly.
QuotientReport quotient_check(const MAGeometry& g, std::size_t samples,
                              const SamplingSpec& spec = {});

struct ScalingReport {
  double max_h_error = 0.0;   // relative |rho^2 h(z) - h(rho^{2s} z)|
  double max_dh_error = 0.0;  // relative |rho^{2-2s} h'(z) - h'(rho^{2s} z)|
  std::size_t membership_mismatches = 0;
  std::size_t samples = 0;
};

ScalingReport scaling_check(const MAGeometry& g, int dimension, std::size_t samples,
                            const SamplingSpec& spec = {});

}  // namespace fraclab
