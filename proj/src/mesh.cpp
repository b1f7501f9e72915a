#include "fraclab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fraclab {

Axis uniform_axis(double lo, double hi, std::size_t cells) {
  if (cells < 2 || !(hi > lo)) throw std::invalid_argument("uniform_axis: need hi > lo, cells >= 2");
  Axis a(cells + 1);
  const double h = (hi - lo) / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) a[i] = lo + h * static_cast<double>(i);
  a.back() = hi;
  return a;
}

Axis geometric_axis_from_zero(double extent, double ratio, double smallest) {
  if (!(ratio > 0.0 && ratio < 1.0) || !(smallest > 0.0) || !(extent > smallest))
    throw std::invalid_argument("geometric_axis_from_zero: need 0<ratio<1, 0<smallest<extent");
  // Nodes extent * ratio^k for k = 0..K with extent*ratio^K >= smallest.
  Axis tail;
  for (int k = 0;; ++k) {
    const double v = extent * std::pow(ratio, k);
    if (v < smallest) break;
    tail.push_back(v);
  }
  Axis a{0.0};
  a.insert(a.end(), tail.rbegin(), tail.rend());
  return a;
}

Axis geometric_axis_symmetric(double extent, double ratio, double smallest) {
  const Axis half = geometric_axis_from_zero(extent, ratio, smallest);
  Axis a;
  for (auto it = half.rbegin(); it != half.rend(); ++it)
    if (*it > 0.0) a.push_back(-*it);
  a.insert(a.end(), half.begin(), half.end());
  return a;
}

Axis power_axis(double extent, std::size_t cells, double gamma) {
  if (cells < 2 || !(extent > 0.0) || !(gamma >= 1.0))
    throw std::invalid_argument("power_axis: need extent > 0, cells >= 2, gamma >= 1");
  Axis a(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j)
    a[j] = extent * std::pow(static_cast<double>(j) / static_cast<double>(cells), gamma);
  a.back() = extent;
  return a;
}

std::size_t locate_cell(const Axis& axis, double v) {
  const double lo = axis.front(), hi = axis.back();
  const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (v < lo - slack || v > hi + slack || std::isnan(v))
    throw std::out_of_range("locate_cell: value outside axis range");
  const auto it = std::upper_bound(axis.begin(), axis.end(), v);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - axis.begin() - 1, 0));
  return std::min(i, axis.size() - 2);
}

TensorMesh::TensorMesh(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2) throw std::invalid_argument("TensorMesh: 1 or 2 axes");
  size_ = 1;
  for (const auto& a : axes_) {
    if (a.size() < 3) throw std::invalid_argument("TensorMesh: each axis needs >= 3 nodes");
    if (!std::is_sorted(a.begin(), a.end()) ||
        std::adjacent_find(a.begin(), a.end()) != a.end())
      throw std::invalid_argument("TensorMesh: axis nodes must be strictly increasing");
    size_ *= a.size();
  }
}

std::array<std::size_t, 2> TensorMesh::multi_index(std::size_t idx) const {
  if (dim() == 1) return {idx, 0};
  const auto n1 = axes_[1].size();
  return {idx / n1, idx % n1};
}

std::array<double, 2> TensorMesh::point(std::size_t idx) const {
  const auto [i, j] = multi_index(idx);
  return {axes_[0][i], dim() == 2 ? axes_[1][j] : 0.0};
}

bool TensorMesh::is_boundary(std::size_t idx) const {
  const auto [i, j] = multi_index(idx);
  if (i == 0 || i + 1 == axes_[0].size()) return true;
  if (dim() == 2 && (j == 0 || j + 1 == axes_[1].size())) return true;
  return false;
}

bool TensorMesh::uniform() const {
  for (const auto& a : axes_) {
    const double h = a[1] - a[0];
    for (std::size_t i = 1; i + 1 < a.size(); ++i)
      if (std::abs((a[i + 1] - a[i]) - h) > 1e-12 * std::abs(h) * 16) return false;
  }
  return true;
}

}  // namespace fraclab
