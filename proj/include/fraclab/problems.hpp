#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fraclab/extension.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/grid_function.hpp"
#include "fraclab/regularity.hpp"

namespace fraclab {

// Built-in problems shared by the command-line tool and the test suite.

// Mesh self-similar under (x, y) -> (x, y) / 2: geometric lateral axis on
// [-2 sqrt 2, 2 sqrt 2] and geometric y-axis up to 4 sqrt(1 - s), both with
// ratio 2^{-1/per_octave}.
struct SelfSimilarMesh {
  int per_octave = 8;
  double x_smallest = 1e-5;
  double y_smallest = 1e-6;
};
ExtensionMesh self_similar_mesh(double s, const SelfSimilarMesh& spec = {});

// Schauder benchmarks on the self-similar mesh.  Kinked: Neumann datum |x|^alpha
// with zero lateral/top data.  Harmonic: zero Neumann datum with lateral/top
// data cosh(x)(1 + z) + cos(2x) z + sin(x).
ExtensionState kinked_benchmark(double s, double alpha, const SelfSimilarMesh& spec = {});
ExtensionState harmonic_benchmark(double s, const SelfSimilarMesh& spec = {});

// Eigenfunction benchmark on (0, pi): sin(kx) times the closed-form
// extension profile 2^{1-s}/Gamma(s) (ky)^s K_s(ky) in the transformed
// coordinate y.  Bottom data is the Neumann flux -d_s k^{2s} sin(kx) or the
// Dirichlet trace sin(kx); the lateral/top data is the exact solution.
double eigen_profile(double s, double k, double y);
ExtensionProblem eigen_problem(double s, double k, BottomCondition bottom);
// Uniform lateral mesh with `cells` cells and power-graded y-axis to y = 8.
ExtensionMesh eigen_mesh(double s, std::size_t cells);

// Sliding-paraboloid fixture: U = depth * delta_Phi((0.1, 0.1), .) on a grid
// uniform in (x, h'(z)) over [-1, 1] x [-h'(1), h'(1)], with the vertex set
// B = {|x| < 1/2, |h'(z)| < h'(1)/2}.
struct SlidingFixture {
  GridFunction U;
  std::vector<std::size_t> vertices;
};
SlidingFixture sliding_fixture(const MAGeometry& g, std::size_t cells, double depth);

// Positive harmonic solutions on S_1 x S_1^+ with Dirichlet data
// c + sum_m a_m cos(1.3 m x + phase_m) e^{-decay z}, sum |a_m| = 0.95 c.
struct HarnackFixture {
  double s = 0.5;
  double c = 1.0;
  std::array<double, 3> a{};
  std::array<double, 3> phase{};
  double decay = 0.0;

  [[nodiscard]] double boundary(double x, double z) const;
};

// `count` fixtures cycling s through {1/4, 1/2, 3/4}.
std::vector<HarnackFixture> harnack_family(std::size_t count, std::uint64_t seed);
// Uniform lateral mesh and power-graded vertical mesh with `cells` cells each.
ExtensionState solve_harnack_fixture(const HarnackFixture& fixture, std::size_t cells);

struct HarnackSweep {
  std::vector<HarnackReport> reports;
  double C_hat = 0.0;  // max Q
};
HarnackSweep harnack_sweep(const std::vector<HarnackFixture>& family, std::size_t cells, double R = 0.5,
                           double kappa = 0.5);

}  // namespace fraclab
