#pragma once

#include <cstddef>
#include <vector>

#include "fraclab/coefficients.hpp"
#include "fraclab/mesh.hpp"

namespace fraclab {

// Finite-difference weights of u -> a^{ij}(x) d_ij u at every interior node:
// (a d d u)(node) ~ sum_k weight[k] * u[col[k]] over row(node).  Rows of
// boundary nodes are empty.
struct StencilTable {
  std::vector<std::size_t> row_start;  // size = nodes + 1
  std::vector<std::size_t> col;
  std::vector<double> weight;
  // True when every off-diagonal weight is nonnegative (M-matrix form).
  bool monotone = true;
  std::size_t nonmonotone_nodes = 0;

  [[nodiscard]] std::size_t rows() const { return row_start.size() - 1; }
  [[nodiscard]] double apply(std::size_t node, const std::vector<double>& u) const;
};

// Second-order centred differences (three-point on nonuniform axes).  Mixed
// terms use the seven-point stencil oriented by sign(a12) whenever its
// off-diagonal weights stay nonnegative, else the centred four-corner
// stencil, which is counted in nonmonotone_nodes.
StencilTable assemble_stencil(const TensorMesh& mesh, const CoefficientField& a);

}  // namespace fraclab
