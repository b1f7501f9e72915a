#include "fraclab/extension.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fraclab/fitting.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/stencil.hpp"

namespace fraclab {

double transform_to_y(double z, double s) {
  if (!(z >= 0.0)) throw std::invalid_argument("transform_to_y: z must be >= 0");
  return 2.0 * s * std::pow(z, 1.0 / (2.0 * s));
}

double transform_to_z(double y, double s) {
  if (!(y >= 0.0)) throw std::invalid_argument("transform_to_z: y must be >= 0");
  return std::pow(y / (2.0 * s), 2.0 * s);
}

double default_grading(double s) { return std::max(1.0, 1.0 / (2.0 - 2.0 * s)); }

ExtensionMesh make_extension_mesh(TensorMesh x, double s, double Z, std::size_t cells,
                                  std::optional<double> gamma, CoordinateMode mode) {
  if (!(Z > 0.0)) throw std::invalid_argument("make_extension_mesh: Z must be > 0");
  const double g = gamma.value_or(default_grading(s));
  const double top = mode == CoordinateMode::TransformedY ? transform_to_y(Z, s) : Z;
  return {std::move(x), power_axis(top, cells, g)};
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

double signed_y2(double y) { return y < 0.0 ? -y * y : y * y; }

// Derivative at t of the quadratic through (t_k, v_k), k = 0..2.
double quadratic_slope(const double* t, const double* v, double at) {
  double d = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    const double denom = (t[k] - t[a]) * (t[k] - t[b]);
    d += v[k] * ((at - t[a]) + (at - t[b])) / denom;
  }
  return d;
}

// Dual-cell boundaries b_{j+1/2} in y.  The first one makes the bottom cell
// exact for both W = y^{2s} and W = y^2.
std::vector<double> dual_boundaries(const Axis& y, double s) {
  std::vector<double> b(y.size() - 1);
  b[0] = std::pow(s, 1.0 / (2.0 - 2.0 * s)) * y[1];
  for (std::size_t j = 1; j < b.size(); ++j) b[j] = 0.5 * (y[j] + y[j + 1]);
  return b;
}

}  // namespace

ExtensionState solve_extension(const ExtensionProblem& p, const ExtensionMesh& mesh) {
  const double s = p.s;
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("solve_extension: s must lie in (0,1)");
  if (!p.dirichlet) throw std::invalid_argument("solve_extension: lateral/top data g is required");
  if (!p.bottom_data) throw std::invalid_argument("solve_extension: bottom data is required");
  const TensorMesh& X = mesh.x;
  if (p.a.dim() != X.dim()) throw std::invalid_argument("solve_extension: coefficient dimension mismatch");
  const Axis& V = mesh.vertical;
  if (V.size() < 4 || V.front() != 0.0 || !std::is_sorted(V.begin(), V.end()))
    throw std::invalid_argument("solve_extension: vertical axis must start at 0 with >= 4 nodes");
  if (!p.top_values.empty() && p.top_values.size() != X.size())
    throw std::invalid_argument("solve_extension: top_values must have one entry per lateral node");
  p.a.check_ellipticity(X);

  const bool transformed = p.mode == CoordinateMode::TransformedY;
  const bool neumann = p.bottom == BottomCondition::Neumann;
  const std::size_t nz = V.size(), m = nz - 1;

  ExtensionState st;
  st.s = s;
  st.x = X;
  st.mode = p.mode;
  st.bottom = p.bottom;
  st.y.resize(nz);
  st.z.resize(nz);
  for (std::size_t j = 0; j < nz; ++j) {
    st.y[j] = transformed ? V[j] : transform_to_y(V[j], s);
    st.z[j] = transformed ? transform_to_z(V[j], s) : V[j];
  }
  st.z[0] = st.y[0] = 0.0;

  const double exponent = 2.0 - 2.0 * s;
  if (transformed) {
    const double share = std::pow(V[1] / V.back(), exponent);
    if (share > 0.1) {
      std::ostringstream msg;
      msg << "solve_extension: vertical mesh too coarse, first cell carries " << share
          << " of the weight (limit 0.1); refine or increase grading";
      throw std::invalid_argument(msg.str());
    }
  }

  const StencilTable lat = assemble_stencil(X, p.a);
  st.monotone = lat.monotone;
  st.grading = std::log(V[1] / V.back()) / std::log(1.0 / static_cast<double>(m));
  st.scheme = transformed ? "transformed-y weighted finite volume, two-point exact fluxes"
                          : "native-z three-point with one-sided quadratic Neumann row";
  if (!transformed) st.monotone = false;

  auto xp = [&](std::size_t ix) { return X.point(ix); };
  auto g = [&](std::size_t ix, std::size_t j) {
    const auto pt = xp(ix);
    if (j == m && !p.top_values.empty()) return p.top_values[ix];
    return p.dirichlet(pt[0], pt[1], st.z[j]);
  };
  auto F = [&](std::size_t ix, std::size_t j) {
    if (!p.rhs) return 0.0;
    const auto pt = xp(ix);
    return p.rhs(pt[0], pt[1], st.z[j]);
  };

  // Known values: lateral boundary, top row, bottom row for Dirichlet.
  st.U.assign(X.size() * nz, 0.0);
  std::vector<char> known(X.size() * nz, 0);
  for (std::size_t ix = 0; ix < X.size(); ++ix) {
    const bool lateral = X.is_boundary(ix);
    for (std::size_t j = 0; j < nz; ++j) {
      const auto k = st.index(ix, j);
      if (lateral || j == m) {
        st.U[k] = g(ix, j);
        known[k] = 1;
      } else if (j == 0 && !neumann) {
        const auto pt = xp(ix);
        st.U[k] = p.bottom_data(pt[0], pt[1]);
        known[k] = 1;
      }
    }
  }
  std::vector<std::ptrdiff_t> unknown(st.U.size(), -1);
  std::size_t n = 0;
  for (std::size_t k = 0; k < st.U.size(); ++k)
    if (!known[k]) unknown[k] = static_cast<std::ptrdiff_t>(n++);
  if (n == 0) throw std::invalid_argument("solve_extension: no unknowns");

  std::vector<double> mass(nz, 0.0), cup(nz, 0.0);
  if (transformed) {
    const auto b = dual_boundaries(V, s);
    for (std::size_t j = 0; j < m; ++j) {
      const double lo = j == 0 ? 0.0 : std::pow(b[j - 1], exponent);
      mass[j] = (std::pow(b[j], exponent) - lo) / exponent;
      cup[j] = 2.0 * s / (std::pow(V[j + 1], 2.0 * s) - std::pow(V[j], 2.0 * s));
    }
  }
  const double flux_to_y = std::pow(2.0 * s, 1.0 - 2.0 * s);  // d_zU -> y^{1-2s} d_yW

  // Row (ix, j) as a list of (global node, weight) and a right-hand side.
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    double rhs = 0.0;
  };
  auto build_row = [&](std::size_t ix, std::size_t j) {
    Row r;
    const double sx = transformed ? mass[j] : 1.0;
    for (std::size_t q = lat.row_start[ix]; q < lat.row_start[ix + 1]; ++q)
      r.terms.emplace_back(st.index(lat.col[q], j), sx * lat.weight[q]);
    const auto pt = xp(ix);
    if (transformed) {
      r.terms.emplace_back(st.index(ix, j + 1), cup[j]);
      r.terms.emplace_back(st.index(ix, j), -cup[j]);
      if (j > 0) {
        r.terms.emplace_back(st.index(ix, j - 1), cup[j - 1]);
        r.terms.emplace_back(st.index(ix, j), -cup[j - 1]);
        r.rhs = mass[j] * F(ix, j);
      } else {
        r.rhs = mass[0] * F(ix, 0) + flux_to_y * p.bottom_data(pt[0], pt[1]);
      }
    } else if (j > 0) {
      const double hm = V[j] - V[j - 1], hp = V[j + 1] - V[j];
      const double w = std::pow(V[j], 2.0 - 1.0 / s);
      r.terms.emplace_back(st.index(ix, j - 1), w * 2.0 / (hm * (hm + hp)));
      r.terms.emplace_back(st.index(ix, j + 1), w * 2.0 / (hp * (hm + hp)));
      r.terms.emplace_back(st.index(ix, j), -w * 2.0 / (hm * hp));
      r.rhs = F(ix, j);
    } else {
      r.terms.clear();
      const double h1 = V[1], h2 = V[2];
      r.terms.emplace_back(st.index(ix, 0), -(h1 + h2) / (h1 * h2));
      r.terms.emplace_back(st.index(ix, 1), h2 / (h1 * (h2 - h1)));
      r.terms.emplace_back(st.index(ix, 2), -h1 / (h2 * (h2 - h1)));
      r.rhs = p.bottom_data(pt[0], pt[1]);
    }
    return r;
  };

  std::vector<Triplet> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> row_node(n);
  for (std::size_t k = 0; k < st.U.size(); ++k) {
    if (known[k]) continue;
    const auto row = static_cast<Eigen::Index>(unknown[k]);
    row_node[static_cast<std::size_t>(row)] = k;
    const Row r = build_row(k / nz, k % nz);
    double b = r.rhs;
    for (const auto& [node, w] : r.terms) {
      if (known[node]) b -= w * st.U[node];
      else trip.emplace_back(row, unknown[node], w);
    }
    rhs[row] = b;
  }
  // Rows are equilibrated by their diagonal: cell weights span many decades
  // on graded meshes and unscaled rows lose accuracy in the factorisation.
  std::vector<double> diag(n, 0.0);
  for (const auto& t : trip)
    if (t.row() == t.col()) diag[static_cast<std::size_t>(t.row())] += t.value();
  for (auto& t : trip) t = Triplet(t.row(), t.col(), t.value() / std::abs(diag[static_cast<std::size_t>(t.row())]));
  for (std::size_t r = 0; r < n; ++r) rhs[static_cast<Eigen::Index>(r)] /= std::abs(diag[r]);
  SpMat A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "solve_extension: sparse LU failed on " << n << " unknowns: " << lu.lastErrorMessage();
    throw std::runtime_error(msg.str());
  }
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite())
    throw std::runtime_error("solve_extension: back-substitution failed");
  // Refinement with residuals accumulated in extended precision.
  {
    using Ext = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    Ext xl = sol.cast<long double>();
    for (int pass = 0; pass < 3; ++pass) {
      Ext r = rhs.cast<long double>();
      for (Eigen::Index c = 0; c < A.outerSize(); ++c)
        for (SpMat::InnerIterator it(A, c); it; ++it) r[it.row()] -= static_cast<long double>(it.value()) * xl[c];
      xl += lu.solve(r.cast<double>().eval()).cast<long double>();
    }
    sol = xl.cast<double>();
  }
  for (std::size_t k = 0; k < st.U.size(); ++k)
    if (!known[k]) st.U[k] = sol[unknown[k]];

  // Normwise relative residuals, split into bottom rows and the rest.
  const Eigen::VectorXd res = A * sol - rhs;
  double anorm = 0.0;
  for (Eigen::Index c = 0; c < A.outerSize(); ++c)
    for (SpMat::InnerIterator it(A, c); it; ++it) anorm = std::max(anorm, std::abs(it.value()));
  anorm *= 8.0;
  const double scale = anorm * sol.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
  double rin = 0.0, rbot = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double& slot = row_node[r] % nz == 0 ? rbot : rin;
    slot = std::max(slot, std::abs(res[static_cast<Eigen::Index>(r)]));
  }
  st.interior_residual = scale > 0.0 ? rin / scale : rin;
  st.neumann_residual = scale > 0.0 ? rbot / scale : rbot;

  // Data on {z = 0}.
  std::vector<double> bottom_row(X.size());
  for (std::size_t q = 0; q < X.size(); ++q) bottom_row[q] = st.U[st.index(q, 0)];
  st.flux.assign(X.size(), 0.0);
  st.trace.assign(X.size(), 0.0);
  for (std::size_t ix = 0; ix < X.size(); ++ix) {
    st.trace[ix] = st.U[st.index(ix, 0)];
    const auto pt = xp(ix);
    if (neumann) {
      st.flux[ix] = p.bottom_data(pt[0], pt[1]);
    } else if (transformed) {
      // Flux balance of the bottom cell (lateral term dropped on the boundary).
      double lat_term = 0.0;
      if (!X.is_boundary(ix)) lat_term = lat.apply(ix, bottom_row);
      const double g0 = mass[0] * (lat_term - F(ix, 0)) + cup[0] * (st.U[st.index(ix, 1)] - st.U[st.index(ix, 0)]);
      st.flux[ix] = g0 / flux_to_y;
    } else {
      const double h1 = V[1], h2 = V[2];
      st.flux[ix] = -(h1 + h2) / (h1 * h2) * st.U[st.index(ix, 0)] + h2 / (h1 * (h2 - h1)) * st.U[st.index(ix, 1)] -
                    h1 / (h2 * (h2 - h1)) * st.U[st.index(ix, 2)];
    }
  }
  double fs = 0.0;
  for (std::size_t ix = 0; ix < X.size(); ++ix)
    for (std::size_t j = 0; j < nz; ++j) fs = std::max(fs, std::abs(F(ix, j)));
  st.rhs_sup = fs;
  return st;
}

std::size_t ExtensionState::zero_row() const {
  for (std::size_t j = 0; j < z.size(); ++j)
    if (z[j] == 0.0) return j;
  throw std::logic_error("ExtensionState: no z = 0 row");
}

double ExtensionState::interpolate(double x1, double x2, double zq) const {
  const double yq = zq < 0.0 ? -transform_to_y(-zq, s) : transform_to_y(zq, s);
  Axis key(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) key[j] = signed_y2(y[j]);
  const double kq = signed_y2(yq);
  const std::size_t jv = locate_cell(key, kq);
  const double tv = std::clamp((kq - key[jv]) / (key[jv + 1] - key[jv]), 0.0, 1.0);

  const Axis& a0 = x.axis(0);
  const std::size_t i0 = locate_cell(a0, x1);
  const double t0 = std::clamp((x1 - a0[i0]) / (a0[i0 + 1] - a0[i0]), 0.0, 1.0);
  auto lateral = [&](std::size_t j) {
    if (x.dim() == 1) return (1 - t0) * at(i0, j) + t0 * at(i0 + 1, j);
    const Axis& a1 = x.axis(1);
    const std::size_t i1 = locate_cell(a1, x2);
    const double t1 = std::clamp((x2 - a1[i1]) / (a1[i1 + 1] - a1[i1]), 0.0, 1.0);
    auto node = [&](std::size_t a, std::size_t b) { return at(x.index(a, b), j); };
    return (1 - t0) * ((1 - t1) * node(i0, i1) + t1 * node(i0, i1 + 1)) +
           t0 * ((1 - t1) * node(i0 + 1, i1) + t1 * node(i0 + 1, i1 + 1));
  };
  return (1 - tv) * lateral(jv) + tv * lateral(jv + 1);
}

double ExtensionState::dz(std::size_t ix, double zq) const {
  if (!(zq > 0.0)) throw std::invalid_argument("ExtensionState::dz: z must be > 0");
  const std::size_t j0 = zero_row();
  const bool native = mode == CoordinateMode::NativeZ;
  const double tq = native ? zq : transform_to_y(zq, s);
  const Axis& t = native ? z : y;
  if (tq > t.back() * (1 + 1e-12)) throw std::out_of_range("ExtensionState::dz: z above the mesh");
  // Three consecutive nodes in z >= 0 closest to the query.
  std::size_t c = locate_cell(t, tq);
  c = std::max(c, j0);
  std::size_t lo = c == j0 ? j0 : c - 1;
  if (tq - t[c] > t[c + 1] - tq && c + 2 < t.size()) lo = c;
  lo = std::min(lo, t.size() - 3);
  const double tt[3] = {t[lo], t[lo + 1], t[lo + 2]};
  const double vv[3] = {at(ix, lo), at(ix, lo + 1), at(ix, lo + 2)};
  const double slope = quadratic_slope(tt, vv, tq);
  if (native) return slope;
  return std::pow(2.0 * s, 2.0 * s - 1.0) * std::pow(tq, 1.0 - 2.0 * s) * slope;
}

GridFunction to_grid_function(const ExtensionState& st) {
  if (st.x.dim() != 1) throw std::invalid_argument("to_grid_function: one lateral dimension only");
  return GridFunction(TensorMesh({st.x.axis(0), st.z}), st.U);
}

ExtensionState reflect_even(const ExtensionState& st) {
  if (st.reflected) return st;
  ExtensionState r = st;
  const std::size_t nz = st.z.size(), m = nz - 1;
  r.z.assign(2 * m + 1, 0.0);
  r.y.assign(2 * m + 1, 0.0);
  for (std::size_t j = 0; j <= m; ++j) {
    r.z[m + j] = st.z[j];
    r.z[m - j] = -st.z[j];
    r.y[m + j] = st.y[j];
    r.y[m - j] = -st.y[j];
  }
  r.z[m] = r.y[m] = 0.0;
  r.U.assign(st.x.size() * (2 * m + 1), 0.0);
  for (std::size_t ix = 0; ix < st.x.size(); ++ix)
    for (std::size_t j = 0; j <= m; ++j) {
      r.U[r.index(ix, m + j)] = st.at(ix, j);
      r.U[r.index(ix, m - j)] = st.at(ix, j);
    }
  r.reflected = true;
  return r;
}

namespace {

// Bilinear interpolation of per-lateral-node values.
double lateral_interp(const TensorMesh& x, const std::vector<double>& v, double x1, double x2) {
  const Axis& a0 = x.axis(0);
  const std::size_t i0 = locate_cell(a0, x1);
  const double t0 = std::clamp((x1 - a0[i0]) / (a0[i0 + 1] - a0[i0]), 0.0, 1.0);
  if (x.dim() == 1) return (1 - t0) * v[i0] + t0 * v[i0 + 1];
  const Axis& a1 = x.axis(1);
  const std::size_t i1 = locate_cell(a1, x2);
  const double t1 = std::clamp((x2 - a1[i1]) / (a1[i1 + 1] - a1[i1]), 0.0, 1.0);
  auto node = [&](std::size_t a, std::size_t b) { return v[x.index(a, b)]; };
  return (1 - t0) * ((1 - t1) * node(i0, i1) + t1 * node(i0, i1 + 1)) +
         t0 * ((1 - t1) * node(i0 + 1, i1) + t1 * node(i0 + 1, i1 + 1));
}

bool inside(const Axis& a, double v) {
  const double slack = 1e-12 * std::max({1.0, std::abs(a.front()), std::abs(a.back())});
  return v >= a.front() - slack && v <= a.back() + slack;
}

}  // namespace

ExtensionState rescale_solution(const ExtensionState& st, double rho,
                                const std::optional<RescaleTarget>& target) {
  if (!(rho > 0.0)) throw std::invalid_argument("rescale_solution: rho must be > 0");
  const TensorMesh tx = target ? target->x : st.x;
  const Axis tz = target ? target->z : st.z;
  if (tx.dim() != st.x.dim()) throw std::invalid_argument("rescale_solution: lateral dimension mismatch");
  const double zs = std::pow(rho, 2.0 * st.s);
  for (int d = 0; d < tx.dim(); ++d)
    if (!inside(st.x.axis(d), rho * tx.lo(d)) || !inside(st.x.axis(d), rho * tx.hi(d)))
      throw std::out_of_range("rescale_solution: scaled target leaves the source in x");
  if (!inside(st.z, zs * tz.front()) || !inside(st.z, zs * tz.back()))
    throw std::out_of_range("rescale_solution: scaled target leaves the source in z");

  ExtensionState v;
  v.s = st.s;
  v.x = tx;
  v.z = tz;
  v.y.resize(tz.size());
  for (std::size_t j = 0; j < tz.size(); ++j)
    v.y[j] = tz[j] < 0.0 ? -transform_to_y(-tz[j], st.s) : transform_to_y(tz[j], st.s);
  v.mode = st.mode;
  v.bottom = st.bottom;
  v.reflected = tz.front() < 0.0;
  v.grading = st.grading;
  v.monotone = st.monotone;
  v.scheme = st.scheme + "; rescaled by bilinear interpolation in (x, h(z))";
  v.interior_residual = st.interior_residual;
  v.neumann_residual = st.neumann_residual;
  v.U.resize(tx.size() * tz.size());
  v.flux.resize(tx.size());
  v.trace.resize(tx.size());
  for (std::size_t ix = 0; ix < tx.size(); ++ix) {
    const auto p = tx.point(ix);
    for (std::size_t j = 0; j < tz.size(); ++j)
      v.U[v.index(ix, j)] = st.interpolate(rho * p[0], rho * p[1], zs * tz[j]);
    v.flux[ix] = zs * lateral_interp(st.x, st.flux, rho * p[0], rho * p[1]);
    v.trace[ix] = lateral_interp(st.x, st.trace, rho * p[0], rho * p[1]);
  }
  v.rhs_sup = rho * rho * st.rhs_sup;
  v.scale = st.scale * rho;
  std::ostringstream meta;
  meta << "rho=" << v.scale << ": coefficients a(rho x); Neumann datum rho^{2s} f(rho x); right-hand side "
       << "rho^2 F(rho x, rho^{2s} z)";
  v.data_transform = meta.str();
  return v;
}

DecayFit dz_decay(const ExtensionState& st, double x_radius, const std::vector<double>& zs) {
  DecayFit out;
  for (double zq : zs) {
    double sup = 0.0;
    bool any = false;
    for (std::size_t ix = 0; ix < st.x.size(); ++ix) {
      const auto p = st.x.point(ix);
      if (0.5 * (p[0] * p[0] + p[1] * p[1]) >= x_radius) continue;
      sup = std::max(sup, std::abs(st.dz(ix, zq)));
      any = true;
    }
    if (!any) throw std::invalid_argument("dz_decay: no lateral nodes in the probe region");
    out.scale.push_back(zq);
    out.value.push_back(sup);
  }
  const auto fit = fit_power_law(out.scale, out.value);
  out.exponent = fit.exponent;
  out.prefactor = fit.prefactor;
  return out;
}

DecayFit x_derivative_scaling(const ExtensionState& st, double x0, int k, const std::vector<double>& radii) {
  if (st.x.dim() != 1) throw std::invalid_argument("x_derivative_scaling: one lateral dimension only");
  if (k != 1 && k != 2) throw std::invalid_argument("x_derivative_scaling: k must be 1 or 2");
  const Axis& X = st.x.axis(0);
  const std::size_t j0 = st.zero_row(), nz = st.nz();
  auto deriv = [&](std::size_t i, std::size_t j) {
    const double hm = X[i] - X[i - 1], hp = X[i + 1] - X[i];
    const double um = st.at(i - 1, j), u0 = st.at(i, j), up = st.at(i + 1, j);
    if (k == 1) return (hm * hm * (up - u0) + hp * hp * (u0 - um)) / (hm * hp * (hm + hp));
    return 2.0 * (hm * (up - u0) - hp * (u0 - um)) / (hm * hp * (hm + hp));
  };
  DecayFit out;
  for (double r : radii) {
    const double inner = std::sqrt(r / 2.0), outer = std::sqrt(2.0 * r);
    double sup = 0.0, hi = -INFINITY, lo = INFINITY;
    std::size_t count = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double d = std::abs(X[i] - x0);
      for (std::size_t j = j0; j < nz; ++j) {
        if (d < outer && st.y[j] < outer) {
          hi = std::max(hi, st.at(i, j));
          lo = std::min(lo, st.at(i, j));
        }
        if (d < inner && st.y[j] < inner && i > 0 && i + 1 < X.size()) {
          sup = std::max(sup, std::abs(deriv(i, j)));
          ++count;
        }
      }
    }
    if (count == 0) throw std::invalid_argument("x_derivative_scaling: radius below mesh resolution");
    out.scale.push_back(r);
    out.value.push_back(hi > lo ? sup / (hi - lo) : 0.0);
  }
  const auto fit = fit_power_law(out.scale, out.value);
  out.exponent = fit.exponent;
  out.prefactor = fit.prefactor;
  return out;
}

ExtremaReport extrema_report(const ExtensionState& st) {
  const std::size_t j0 = st.zero_row(), nz = st.nz();
  ExtremaReport r{-INFINITY, INFINITY, -INFINITY, INFINITY};
  for (std::size_t ix = 0; ix < st.x.size(); ++ix)
    for (std::size_t j = j0; j < nz; ++j) {
      const bool boundary = st.x.is_boundary(ix) || j + 1 == nz ||
                            (j == j0 && st.bottom == BottomCondition::Dirichlet);
      const double v = st.at(ix, j);
      if (boundary) {
        r.boundary_max = std::max(r.boundary_max, v);
        r.boundary_min = std::min(r.boundary_min, v);
      } else {
        r.interior_max = std::max(r.interior_max, v);
        r.interior_min = std::min(r.interior_min, v);
      }
    }
  return r;
}

}  // namespace fraclab
