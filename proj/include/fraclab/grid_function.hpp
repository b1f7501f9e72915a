#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fraclab/mesh.hpp"

namespace fraclab {

// Values sampled on a TensorMesh.  Boundary nodes carry Dirichlet data.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(TensorMesh mesh, double fill = 0.0);
  GridFunction(TensorMesh mesh, std::vector<double> values);

  // Samples f at interior nodes and sets boundary nodes to zero.
  static GridFunction sample_dirichlet(const TensorMesh& mesh,
                                       const std::function<double(double, double)>& f);
  // Samples f at every node.
  static GridFunction sample(const TensorMesh& mesh,
                             const std::function<double(double, double)>& f);

  [[nodiscard]] const TensorMesh& mesh() const noexcept { return mesh_; }
  [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool finite() const;
  // Largest |value| on boundary nodes.
  [[nodiscard]] double boundary_max_abs() const;

 private:
  TensorMesh mesh_;
  std::vector<double> values_;
};

// CSV: header "x[,y],value", one row per node in mesh order, 17 significant
// digits so the file round-trips exactly.
void write_csv(std::ostream& os, const GridFunction& u);
GridFunction read_csv(std::istream& is);

// Binary grid format, little-endian:
//   bytes 0..7   magic "FRLGRID1"
//   uint32       number of axes d (1..3)
//   uint32       dtype code (1 = float64)
//   uint64[d]    axis lengths
//   float64[]    axis coordinates, axis 0 first
//   float64[]    values, row-major, last axis fastest
struct BinaryGrid {
  std::vector<Axis> axes;
  std::vector<double> values;
};
void write_binary_grid(const std::string& path, const BinaryGrid& grid);
BinaryGrid read_binary_grid(const std::string& path);

}  // namespace fraclab
