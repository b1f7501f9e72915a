#pragma once

#include <memory>
#include <vector>

#include "fraclab/coefficients.hpp"
#include "fraclab/grid_function.hpp"
#include "fraclab/stencil.hpp"

namespace fraclab {

enum class Integrator { ImplicitEuler, CrankNicolson };

// Geometric node ladder t_j = t_min r^j on [t_min, t_max].  Integrals are
// taken in log t with end-corrected (Gregory) trapezoid weights; the pieces
// (0, t_min) and (t_max, inf) are handled by analytic expansions.  Heat
// solves along the ladder are chained, `substeps` equal steps per interval.
struct QuadratureSpec {
  double t_min = 1e-8;
  double t_max = 1e4;
  std::size_t nodes = 96;
  std::size_t substeps = 8;

  void validate() const;
};

struct QuadratureRule {
  std::vector<double> t;
  std::vector<double> w;  // integral_{t_min}^{t_max} g(t) dt ~ sum_j w_j g(t_j)
};

QuadratureRule make_rule(const QuadratureSpec& spec);

// Discrete L_h = -a^{ij} d_ij with homogeneous Dirichlet conditions and its
// heat semigroup.  Immutable after construction.
class SemigroupStepper {
 public:
  SemigroupStepper(TensorMesh mesh, CoefficientField a, Integrator integrator = Integrator::CrankNicolson,
                   double dt_max = 1e-3);
  ~SemigroupStepper();
  SemigroupStepper(SemigroupStepper&&) noexcept;
  SemigroupStepper& operator=(SemigroupStepper&&) noexcept;

  [[nodiscard]] const TensorMesh& mesh() const noexcept { return mesh_; }
  [[nodiscard]] const CoefficientField& coefficients() const noexcept { return a_; }
  [[nodiscard]] Integrator integrator() const noexcept { return integrator_; }
  [[nodiscard]] double dt_max() const noexcept { return dt_max_; }
  // True when L_h is an M-matrix, so implicit Euler is positivity preserving.
  [[nodiscard]] bool monotone() const noexcept { return stencil_.monotone; }

  // e^{-t L_h} u using ceil(t / dt_max) equal substeps.
  [[nodiscard]] GridFunction heat_apply(const GridFunction& u, double t) const;
  // e^{-t L_h} u using exactly `steps` equal substeps.
  [[nodiscard]] GridFunction heat_apply_steps(const GridFunction& u, double t, std::size_t steps) const;
  // e^{-t_j L_h} u for increasing times, chained through the semigroup
  // property with `substeps` equal steps on every interval.
  [[nodiscard]] std::vector<GridFunction> heat_ladder(const GridFunction& u, const std::vector<double>& times,
                                                      std::size_t substeps) const;
  // L_h u (boundary entries zero).
  [[nodiscard]] GridFunction apply_operator(const GridFunction& u) const;

 private:
  struct Impl;
  void require_dirichlet(const GridFunction& u) const;
  void advance(std::vector<double>& interior, double dt, std::size_t steps) const;

  TensorMesh mesh_;
  CoefficientField a_;
  Integrator integrator_;
  double dt_max_;
  StencilTable stencil_;
  std::unique_ptr<Impl> impl_;
};

struct FractionalResult {
  GridFunction value;
  // Magnitude of the analytic tail pieces that were added.
  double upper_tail = 0.0;  // ||u|| t_max^{-s} / (s |Gamma(-s)|)
  double lower_tail = 0.0;
  // Bounds on what the analytic pieces neglect.
  double upper_tail_residual = 0.0;
  double lower_tail_residual = 0.0;
};

// Gamma(-s) < 0 for s in (0,1), from the reflection formula.
double gamma_negative(double s);
// Trace constant s^{2s} Gamma(1-s) / Gamma(1+s).
double ds_constant(double s);

FractionalResult fractional_apply(const SemigroupStepper& L, const GridFunction& u, double s,
                                  const QuadratureSpec& quad = {});
FractionalResult fractional_inverse(const SemigroupStepper& L, const GridFunction& f, double s,
                                    const QuadratureSpec& quad = {});

struct ExtensionSlices {
  std::vector<double> z;
  std::vector<GridFunction> values;
};

// U(., z) for each z > 0 from the semigroup formula of the extension.
ExtensionSlices extension_via_semigroup(const SemigroupStepper& L, const GridFunction& u, double s,
                                        const std::vector<double>& z, const QuadratureSpec& quad = {});
GridFunction extension_via_semigroup(const SemigroupStepper& L, const GridFunction& u, double s,
                                     double z, const QuadratureSpec& quad = {});

// The same rules applied to a scalar semigroup e^{-lambda t}.
double scalar_fractional(double lambda, double s, const QuadratureSpec& quad = {});
double scalar_inverse(double lambda, double s, const QuadratureSpec& quad = {});
double scalar_extension_profile(double lambda, double s, double z, const QuadratureSpec& quad = {});

// Discrete Dirichlet eigenvalue of the three-point Laplacian for sin(kx) on a
// uniform grid of spacing dx.
double discrete_laplacian_eigenvalue(double k, double dx);

}  // namespace fraclab
