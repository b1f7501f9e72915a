#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "fraclab/geometry.hpp"
#include "fraclab/grid_function.hpp"

namespace fraclab {

// Grid functions in this module live on a two-axis TensorMesh whose axes
// are (x, z): one lateral variable and the extension variable.

// P(x,z) = -a delta_Phi((x_v,z_v),(x,z)) + c.
struct MAParaboloid {
  double a = 1.0;
  Vec xv{0.0};
  double zv = 0.0;
  double c = 0.0;

  [[nodiscard]] double operator()(const MAGeometry& g, std::span<const double> x, double z) const {
    return -a * g.delta_Phi(xv, zv, x, z) + c;
  }
};

// 1/2 <A x, x> + <b, x> z + d h(z) + ell0 + <ell_x, x> + ell_z z.  Lower
// orders leave the unused parts at zero.
struct MAPolynomial {
  int order = 2;
  int n = 1;
  std::vector<double> A;  // n x n, row-major, symmetric
  Vec b;
  double d = 0.0;
  double ell0 = 0.0;
  Vec ell_x;
  double ell_z = 0.0;

  static MAPolynomial zero(int order, int n);
  [[nodiscard]] double operator()(const MAGeometry& g, std::span<const double> x, double z) const;
  // z^{2-1/s} d_zz of the polynomial, which equals d identically.
  [[nodiscard]] double weighted_zz() const { return d; }
};

// Classical second-order data at (x0, z0): Hessian M and gradient p in
// (x, z), value u0.
struct ClassicalQuadratic {
  Eigen::MatrixXd M;
  Eigen::VectorXd p;
  Vec x0;
  double z0 = 1.0;
  double u0 = 0.0;

  [[nodiscard]] double operator()(std::span<const double> x, double z) const;
};

// Replaces the m (z - z0)^2 / 2 part by m |z0|^{2-1/s} delta_h(z0, z) and
// keeps the remaining terms.  Rejects z0 = 0.
MAPolynomial polynomial_to_MA(const MAGeometry& g, const ClassicalQuadratic& pc);

// Pucci extremal operators of a symmetric matrix.
struct PucciPair {
  double minus = 0.0;
  double plus = 0.0;
};
PucciPair pucci(const Eigen::MatrixXd& M, double lambda, double Lambda);

// mu_Phi of the cell owned by node (i, j): x-extent between neighbouring
// midpoints times the h'-increment between z-midpoints.
double node_measure(const MAGeometry& g, const TensorMesh& mesh, std::size_t node);

struct ContactReport {
  std::vector<std::size_t> vertices;             // node indices of B
  std::vector<double> touching_value;            // c(v)
  std::vector<std::vector<std::size_t>> contacts;  // argmin nodes per vertex
  std::vector<std::size_t> contact_set;          // union, sorted
  double mu_A = 0.0;
  double mu_B = 0.0;
  double ratio = 0.0;
  // min over the grid and all vertices of U - P_v (0 up to rounding).
  double min_gap = 0.0;
  // max over contact nodes of |U - P_v|.
  double max_contact_gap = 0.0;
};

// c(v) = min_p U(p) + a delta_Phi(v, p) for every vertex node v; ties within
// 1e-12 (relative to max|U| + 1) are all kept.
ContactReport slide_paraboloids(const MAGeometry& g, const GridFunction& U, const std::vector<std::size_t>& vertices,
                                double a);

struct InfConvolution {
  GridFunction value;
  std::vector<std::size_t> argmin;  // node index of the minimiser per node
};

// U_eps(p) = min over nodes q of U(q) + |p - q|^2 / eps, computed by
// separable lower envelopes (z-lines first, then x-lines); exact over the
// node set.
InfConvolution inf_convolution(const GridFunction& U, double eps);
// Direct O(N^2) minimisation; reference for tests.
InfConvolution inf_convolution_bruteforce(const GridFunction& U, double eps);

// Largest second difference of U along grid lines (nonuniform three-point).
double max_second_difference(const GridFunction& U);

// Test functions phi = P(x) + a z with P(x) = U(x0,0) + q1 (x-x0) + q2 (x-x0)^2/2
// touching U from above at (x0, 0) on the nodes of S_R(x0) x S_R(0).
struct TouchLattice {
  double q1_min = -4.0, q1_max = 4.0;
  double q2_min = -8.0, q2_max = 8.0;
  std::size_t q1_steps = 81, q2_steps = 81;
  double slope_step = 1e-3;
};

struct TouchReport {
  bool found = false;  // false: unbounded at this resolution
  double slope_exact = 0.0;    // min over the lattice of the least admissible a
  double slope_lattice = 0.0;  // rounded up to the slope lattice
  double q1 = 0.0, q2 = 0.0;
  std::size_t candidates = 0;  // lattice members with P >= U on the trace
};

TouchReport touch_test(const MAGeometry& g, const GridFunction& U, std::size_t x0_index, double R,
                       const TouchLattice& lattice = {});

}  // namespace fraclab
