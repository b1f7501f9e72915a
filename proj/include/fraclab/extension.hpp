#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/coefficients.hpp"
#include "fraclab/grid_function.hpp"
#include "fraclab/mesh.hpp"

namespace fraclab {

// y = 2s z^{1/(2s)} and its inverse; h(z) = c_s y^2 / 2.
double transform_to_y(double z, double s);
double transform_to_z(double y, double s);

enum class CoordinateMode { TransformedY, NativeZ };
// Bottom condition on {z = 0}: Neumann prescribes the flux d_z U, Dirichlet
// the trace U(x,0).
enum class BottomCondition { Neumann, Dirichlet };

// a^{ij} d_ij U + z^{2-1/s} d_zz U = F in Omega x (0,Z), with data on {z=0}
// and Dirichlet data g on the lateral and top boundary.
struct ExtensionProblem {
  double s = 0.5;
  CoefficientField a = CoefficientField::identity(1);
  BottomCondition bottom = BottomCondition::Neumann;
  // Neumann flux f(x) or Dirichlet trace, depending on `bottom`.
  std::function<double(double, double)> bottom_data;
  // F(x1, x2, z); empty means F = 0.
  std::function<double(double, double, double)> rhs;
  // g(x1, x2, z) on lateral/top boundary.
  std::function<double(double, double, double)> dirichlet;
  // Optional top-row values (one per lateral node) overriding g at z = Z.
  std::vector<double> top_values;
  CoordinateMode mode = CoordinateMode::TransformedY;
};

// Lateral mesh plus the vertical axis: y-nodes in transformed mode, z-nodes
// in native mode.  Both start at 0.
struct ExtensionMesh {
  TensorMesh x;
  Axis vertical;
};

// Default grading exponent max(1, 1/(2-2s)).
double default_grading(double s);
// Power-graded vertical axis in the coordinate of `mode`, reaching height Z
// in native z units.
ExtensionMesh make_extension_mesh(TensorMesh x, double s, double Z, std::size_t cells,
                                  std::optional<double> gamma = std::nullopt,
                                  CoordinateMode mode = CoordinateMode::TransformedY);

// Discrete solution on lateral nodes x vertical nodes, index ix * nz + j.
struct ExtensionState {
  double s = 0.5;
  TensorMesh x;
  Axis y;  // transformed coordinate, signed after reflection
  Axis z;  // native coordinate, signed after reflection
  std::vector<double> U;
  CoordinateMode mode = CoordinateMode::TransformedY;
  BottomCondition bottom = BottomCondition::Neumann;
  bool reflected = false;
  double interior_residual = 0.0;
  double neumann_residual = 0.0;
  double grading = 1.0;
  std::string scheme;
  bool monotone = true;
  // Data on {z=0} at lateral nodes: prescribed or read-back flux d_z U and
  // the trace U(x,0).
  std::vector<double> flux;
  std::vector<double> trace;
  double rhs_sup = 0.0;
  // Accumulated rescaling factor and the induced data transforms.
  double scale = 1.0;
  std::string data_transform;

  [[nodiscard]] std::size_t nz() const { return z.size(); }
  [[nodiscard]] std::size_t index(std::size_t ix, std::size_t j) const { return ix * z.size() + j; }
  [[nodiscard]] double at(std::size_t ix, std::size_t j) const { return U[index(ix, j)]; }
  [[nodiscard]] std::size_t zero_row() const;  // vertical index of z = 0
  // Bilinear interpolation in (x, signed h(z)).
  [[nodiscard]] double interpolate(double x1, double x2, double z) const;
  // d_z U at a lateral node and height z > 0, from the local quadratic in y.
  [[nodiscard]] double dz(std::size_t ix, double z) const;
};

ExtensionState solve_extension(const ExtensionProblem& problem, const ExtensionMesh& mesh);

// The solution as a grid function on (x, z); one lateral dimension only.
GridFunction to_grid_function(const ExtensionState& state);

// Even reflection U(x,-z) = U(x,z).
ExtensionState reflect_even(const ExtensionState& state);

// Target grid for rescaling; defaults to the source nodes.
struct RescaleTarget {
  TensorMesh x;
  Axis z;
};

// V(x,z) = U(rho x, rho^{2s} z) on the target grid.
ExtensionState rescale_solution(const ExtensionState& state, double rho,
                                const std::optional<RescaleTarget>& target = std::nullopt);

struct DecayFit {
  std::vector<double> scale;  // z values or radii
  std::vector<double> value;
  double exponent = 0.0;
  double prefactor = 0.0;
};

// sup over lateral nodes with |x|^2/2 < x_radius of |d_z U(x, z)| for each z,
// with the fitted power law.
DecayFit dz_decay(const ExtensionState& state, double x_radius, const std::vector<double>& zs);

// For each r: sup over S_{r/4}(x0) x (S^+_{c_s r/4} u {0}) of |D_x^k U|
// divided by the oscillation over S_r(x0) x (S^+_{c_s r} u {0}); one lateral
// dimension.  The fitted exponent is the log-log slope in r.
DecayFit x_derivative_scaling(const ExtensionState& state, double x0, int k,
                              const std::vector<double>& radii);

// Largest interior value minus the boundary maximum, and boundary minimum
// minus smallest interior value (both <= 0 under the maximum principle).
// The bottom row belongs to the interior for Neumann solves.
struct ExtremaReport {
  double interior_max = 0.0, interior_min = 0.0;
  double boundary_max = 0.0, boundary_min = 0.0;
  [[nodiscard]] double max_excess() const { return interior_max - boundary_max; }
  [[nodiscard]] double min_excess() const { return boundary_min - interior_min; }
};
ExtremaReport extrema_report(const ExtensionState& state);

}  // namespace fraclab
