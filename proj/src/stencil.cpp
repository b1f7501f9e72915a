#include "fraclab/stencil.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace fraclab {

double StencilTable::apply(std::size_t node, const std::vector<double>& u) const {
  double acc = 0.0;
  for (std::size_t k = row_start[node]; k < row_start[node + 1]; ++k) acc += weight[k] * u[col[k]];
  return acc;
}

StencilTable assemble_stencil(const TensorMesh& mesh, const CoefficientField& a) {
  if (a.dim() != mesh.dim()) throw std::invalid_argument("assemble_stencil: dimension mismatch");
  StencilTable t;
  t.row_start.reserve(mesh.size() + 1);
  t.row_start.push_back(0);
  std::map<std::size_t, double> row;
  auto add = [&](std::size_t c, double w) { row[c] += w; };

  for (std::size_t idx = 0; idx < mesh.size(); ++idx) {
    row.clear();
    if (!mesh.is_boundary(idx)) {
      const auto [i, j] = mesh.multi_index(idx);
      const auto p = mesh.point(idx);
      const auto c = a(p[0], p[1]);
      const Axis& X = mesh.axis(0);
      const double hxm = X[i] - X[i - 1], hxp = X[i + 1] - X[i];
      const double wxm = 2.0 / (hxm * (hxm + hxp)), wxp = 2.0 / (hxp * (hxm + hxp));
      if (mesh.dim() == 1) {
        add(idx - 1, c.a11 * wxm);
        add(idx + 1, c.a11 * wxp);
        add(idx, -c.a11 * (wxm + wxp));
      } else {
        const Axis& Y = mesh.axis(1);
        const double hym = Y[j] - Y[j - 1], hyp = Y[j + 1] - Y[j];
        const double wym = 2.0 / (hym * (hym + hyp)), wyp = 2.0 / (hyp * (hym + hyp));
        auto id = [&](std::size_t ii, std::size_t jj) { return mesh.index(ii, jj); };
        add(id(i - 1, j), c.a11 * wxm);
        add(id(i + 1, j), c.a11 * wxp);
        add(idx, -c.a11 * (wxm + wxp));
        add(id(i, j - 1), c.a22 * wym);
        add(id(i, j + 1), c.a22 * wyp);
        add(idx, -c.a22 * (wym + wyp));
        if (c.a12 != 0.0) {
          const bool locally_uniform = std::abs(hxm - hxp) <= 1e-12 * hxp &&
                                       std::abs(hym - hyp) <= 1e-12 * hyp;
          const double hx = hxp, hy = hyp;
          const double m = std::abs(c.a12) / (hx * hy);
          const bool seven_ok = locally_uniform && c.a11 / (hx * hx) >= m && c.a22 / (hy * hy) >= m;
          if (seven_ok) {
            if (c.a12 > 0) {
              add(id(i + 1, j + 1), m);
              add(id(i - 1, j - 1), m);
            } else {
              add(id(i + 1, j - 1), m);
              add(id(i - 1, j + 1), m);
            }
            add(id(i + 1, j), -m);
            add(id(i - 1, j), -m);
            add(id(i, j + 1), -m);
            add(id(i, j - 1), -m);
            add(idx, 2.0 * m);
          } else {
            const double w = 2.0 * c.a12 / ((hxm + hxp) * (hym + hyp));
            add(id(i + 1, j + 1), w);
            add(id(i - 1, j - 1), w);
            add(id(i + 1, j - 1), -w);
            add(id(i - 1, j + 1), -w);
            ++t.nonmonotone_nodes;
          }
        }
      }
      for (const auto& [col, w] : row) {
        if (col != idx && w < 0.0) t.monotone = false;
        t.col.push_back(col);
        t.weight.push_back(w);
      }
    }
    t.row_start.push_back(t.col.size());
  }
  if (t.nonmonotone_nodes > 0) t.monotone = false;
  return t;
}

}  // namespace fraclab
