#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fraclab/extension.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/grid_function.hpp"
#include "fraclab/paraboloids.hpp"
#include "fraclab/semigroup.hpp"

namespace fraclab {

// Nodes of a two-axis (x, z) grid with z >= 0, |x - x0|^2/2 < Rx and
// h(z) < Rz.  The trace row z = 0 is included.
std::vector<std::size_t> cylinder_nodes(const MAGeometry& g, const TensorMesh& mesh, double x0, double Rx,
                                        double Rz);

struct HolderOptions {
  std::size_t pair_cap = 2'000'000;  // ordered pairs examined exhaustively up to this count
  std::uint64_t seed = 7;            // sampling beyond the cap
};

// max |U(p) - U(q)| / delta_Phi(p, q)^{beta/2} over ordered node pairs of
// `region` with delta_Phi > 0.  Beyond the pair cap, pairs are drawn with
// a fixed seed and an equal share is kept from every decade of delta_Phi.
double holder_seminorm_MA(const MAGeometry& g, const GridFunction& U, const std::vector<std::size_t>& region,
                          double beta, const HolderOptions& options = {});

struct HarnackReport {
  double x0 = 0.0;
  double R = 0.0;
  double kappa = 0.5;
  double sup = 0.0, inf = 0.0;  // over S_{kappa R}(x0, 0)
  double data_f = 0.0;          // ||f||_inf R^s over the trace of S_R
  double data_F = 0.0;          // ||F||_inf R
  double Q = 0.0;
  std::size_t nodes = 0;
};

// Quotient sup / (inf + data) over the section S_{kappa R}((x0, 0)), using
// the z >= 0 half (solutions are taken even in z).  Throws
// std::invalid_argument if U < 0 at a node of S_R or if S_R leaves the grid.
HarnackReport harnack_quotient(const ExtensionState& state, double x0, double R, double kappa = 0.5);

// One perturbed problem on the cylinder S_1 x S_1^+ in one lateral dimension:
// a = (1 + coefficient_eps), Neumann datum f_eps * cos(pi x / (2 sqrt 2)),
// F = F_eps, and lateral/top data g shared with the harmonic comparison.
struct ApproximationInstance {
  double s = 0.5;
  double coefficient_eps = 0.0;
  double f_eps = 0.0;
  double F_eps = 0.0;
  std::function<double(double, double)> boundary;  // g(x, z)
  std::size_t x_cells = 64;
  std::size_t y_cells = 64;
};

struct ApproximationReport {
  double perturbation = 0.0;  // ||a - I|| + ||f|| + ||F||, measured on the grid
  double distance = 0.0;      // ||U - H|| on (S_{3/4} x S_{3/4}^+) u T_{3/4}
  double residual = 0.0;      // largest solver residual of the two solves
};

// Throws std::invalid_argument when the measured perturbation is not below eps0.
ApproximationReport approximation_distance(double eps0, const ApproximationInstance& instance);

// Order-k Monge-Ampere polynomial in one lateral dimension: k = 0 constant,
// k = 1 adds b x, k = 2 adds A x^2/2 + d h(z).
struct DecayPolynomial {
  int order = 0;
  double c = 0.0, b = 0.0, A = 0.0, d = 0.0;

  [[nodiscard]] double operator()(const MAGeometry& g, double x, double z) const;
  [[nodiscard]] MAPolynomial as_ma_polynomial() const;
};

struct DecayLevel {
  std::size_t j = 0;
  double r = 0.0;       // rho^j
  std::size_t nodes = 0;
  DecayPolynomial poly;
  double error = 0.0;   // sup-error of the minimax fit
  bool used = false;    // inside the fit window
};

struct DecayOptions {
  std::size_t first = 2;            // smallest j entering the exponent fit
  double noise_factor = 10.0;       // E_j below noise_factor * floor is dropped
  // Relative roundoff level of graded-mesh solves; the floor is
  // max(solver residual, this) * max |U|.
  double relative_floor = 1e-12;
  std::size_t min_nodes_x = 5;      // resolution limit per direction
  std::size_t min_nodes_z = 3;
};

struct DecayReport {
  int order = 0;
  double rho = 0.5;
  std::vector<DecayLevel> levels;
  // |c_j - c_{j+1}|, rho^j |b_j - b_{j+1}|, rho^{2j} |A_j - A_{j+1}|, rho^{2j} |d_j - d_{j+1}|.
  std::vector<double> inc_c, inc_b, inc_A, inc_d;
  double noise_floor = 0.0;
  double exponent = 0.0;  // slope of log E_j against log r_j over the used levels
  double prefactor = 0.0;
  std::size_t used = 0;
  std::string warning;   // set when the ladder was truncated
};

// Case of the Schauder estimate from alpha + 2s: 0 below 1, 1 in (1, 2), 2 in (2, 3).
int schauder_order(double alpha, double s);

// Minimax fits of order k on S_{rho^{2j}} x S^+_{rho^{2j}} (k < 2) or
// S_{rho^{2j}} x S^+_{rho^{2j+1}} (k = 2) about the origin, j = 0..depth.
DecayReport schauder_decay(const ExtensionState& state, int order, double rho, std::size_t depth,
                           const DecayOptions& options = {});

struct CampanatoStep {
  std::size_t k = 0;
  DecayPolynomial corrector;  // fit of the rescaled remainder at scale rho^2
  DecayPolynomial accumulated;  // P_{k+1}
  double normalized_error = 0.0;  // sup |U~ - corrector| on the fit set
};

struct CampanatoReport {
  int order = 0;
  double rho = 0.5;
  double exponent = 0.0;  // alpha + 2s used in the normalisation
  std::vector<CampanatoStep> steps;
  DecayPolynomial limit;
  // Regression of log on k for the increments; D_hat = max_k inc_k rho^{-k exponent}.
  double D_hat = 0.0;
  std::string warning;
};

// Inductive rescaling loop: U~_k = rho^{-k e}(U(rho^k x, rho^{2sk} z) - P_k(rho^k x, rho^{2sk} z)),
// corrector fitted on the scale-rho^2 set, P_{k+1} = P_k + rho^{k e} P(rho^{-k} x, rho^{-2sk} z).
CampanatoReport campanato_iterate(const ExtensionState& state, int order, double rho, std::size_t depth,
                                  double exponent);

// u = L^{-s} f on a one-dimensional Dirichlet grid, measured on [a, b].
struct FractionalRegularityProblem {
  double s = 0.5;
  double alpha = 0.5;
  GridFunction f;
  double f_holder = -1.0;  // [f]_{C^{0,alpha}}; negative means measure it on the grid
  double a = 0.0, b = 0.0;  // subdomain
  QuadratureSpec quadrature{};
};

struct FractionalRegularityReport {
  double gamma = 0.0;         // alpha + 2s (first order) or alpha + 2s - 1 (C^{1,.})
  bool first_derivative = false;
  double u_sup = 0.0;         // over the whole grid
  double sub_sup = 0.0;       // over the subdomain
  double sub_grad_sup = 0.0;
  double sub_seminorm = 0.0;  // [u]_gamma or [u']_gamma
  double subdomain_norm = 0.0;
  double f_sup = 0.0;
  double f_holder = 0.0;
  double ratio = 0.0;  // subdomain_norm / (u_sup + f_sup + f_holder)
  GridFunction u;
};

FractionalRegularityReport end_to_end_fractional_regularity(const SemigroupStepper& L,
                                                            const FractionalRegularityProblem& problem);

// Largest |v(x_i) - v(x_j)| / |x_i - x_j|^gamma over node pairs in [a, b].
double holder_seminorm_1d(const Axis& x, const std::vector<double>& v, double gamma, double a, double b);

}  // namespace fraclab
