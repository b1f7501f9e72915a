#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fraclab {

using Axis = std::vector<double>;

// Uniform nodes lo = x_0 < ... < x_cells = hi.
Axis uniform_axis(double lo, double hi, std::size_t cells);
// Geometric nodes 0, h0, h0/q, h0/q^2, ... clipped to end at `extent`, where
// q < 1 is the ratio between consecutive nodes.  Self-similar under scaling by
// powers of q.
Axis geometric_axis_from_zero(double extent, double ratio, double smallest);
// Symmetric geometric axis on [-extent, extent] refined towards 0.
Axis geometric_axis_symmetric(double extent, double ratio, double smallest);
// y_j = Y (j/m)^gamma.
Axis power_axis(double extent, std::size_t cells, double gamma);

// Index i with axis[i] <= v <= axis[i+1] (i <= size-2).  Values within a
// relative 1e-12 of the ends are clamped; anything further out throws
// std::out_of_range.
std::size_t locate_cell(const Axis& axis, double v);

// Tensor-product box mesh in one or two dimensions, row-major with the last
// axis fastest.  Nodes on the box boundary are flagged.
class TensorMesh {
 public:
  TensorMesh() = default;
  explicit TensorMesh(std::vector<Axis> axes);

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(axes_.size()); }
  [[nodiscard]] const Axis& axis(int d) const { return axes_.at(static_cast<std::size_t>(d)); }
  [[nodiscard]] std::size_t extent(int d) const { return axis(d).size(); }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j = 0) const {
    return dim() == 1 ? i : i * axes_[1].size() + j;
  }
  [[nodiscard]] std::array<std::size_t, 2> multi_index(std::size_t idx) const;
  [[nodiscard]] std::array<double, 2> point(std::size_t idx) const;
  [[nodiscard]] bool is_boundary(std::size_t idx) const;
  [[nodiscard]] bool uniform() const;
  [[nodiscard]] double lo(int d) const { return axis(d).front(); }
  [[nodiscard]] double hi(int d) const { return axis(d).back(); }
  [[nodiscard]] bool operator==(const TensorMesh& o) const { return axes_ == o.axes_; }

 private:
  std::vector<Axis> axes_;
  std::size_t size_ = 0;
};

}  // namespace fraclab
