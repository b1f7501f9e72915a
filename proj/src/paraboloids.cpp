#include "fraclab/paraboloids.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fraclab/parallel.hpp"

namespace fraclab {

MAPolynomial MAPolynomial::zero(int order, int n) {
  MAPolynomial p;
  p.order = order;
  p.n = n;
  p.A.assign(static_cast<std::size_t>(n * n), 0.0);
  p.b.assign(static_cast<std::size_t>(n), 0.0);
  p.ell_x.assign(static_cast<std::size_t>(n), 0.0);
  return p;
}

double MAPolynomial::operator()(const MAGeometry& g, std::span<const double> x, double z) const {
  const auto nn = static_cast<std::size_t>(n);
  if (x.size() != nn) throw std::invalid_argument("MAPolynomial: dimension mismatch");
  double v = ell0 + ell_z * z + d * g.h(z);
  for (std::size_t i = 0; i < nn; ++i) {
    v += ell_x[i] * x[i] + b[i] * x[i] * z;
    for (std::size_t j = 0; j < nn; ++j) v += 0.5 * A[i * nn + j] * x[i] * x[j];
  }
  return v;
}

double ClassicalQuadratic::operator()(std::span<const double> x, double z) const {
  const auto n = x0.size();
  Eigen::VectorXd d(static_cast<Eigen::Index>(n + 1));
  for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = x[i] - x0[i];
  d[static_cast<Eigen::Index>(n)] = z - z0;
  return 0.5 * d.dot(M * d) + p.dot(d) + u0;
}

MAPolynomial polynomial_to_MA(const MAGeometry& g, const ClassicalQuadratic& pc) {
  if (pc.z0 == 0.0) throw std::invalid_argument("polynomial_to_MA: base point must have z0 != 0");
  const auto n = pc.x0.size();
  const auto N = static_cast<Eigen::Index>(n);
  if (pc.M.rows() != N + 1 || pc.M.cols() != N + 1 || pc.p.size() != N + 1)
    throw std::invalid_argument("polynomial_to_MA: data must have size n+1");
  auto P = MAPolynomial::zero(2, static_cast<int>(n));
  const double m = pc.M(N, N);
  const double mz = m * std::pow(std::abs(pc.z0), 2.0 - 1.0 / g.s());
  const double z0 = pc.z0;

  // 1/2 <M_n (x-x0), x-x0>
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = pc.M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      P.A[i * n + j] = a;
      P.ell_x[i] -= a * pc.x0[j];
      c += 0.5 * a * pc.x0[i] * pc.x0[j];
    }
  // mz delta_h(z0, z) = mz (h(z) - h(z0) - h'(z0)(z - z0))
  P.d = mz;
  c += mz * (-g.h(z0) + g.dh(z0) * z0);
  P.ell_z -= mz * g.dh(z0);
  // <b, x - x0> (z - z0)
  for (std::size_t i = 0; i < n; ++i) {
    const auto I = static_cast<Eigen::Index>(i);
    const double bi = 0.5 * (pc.M(I, N) + pc.M(N, I));
    P.b[i] = bi;
    P.ell_x[i] -= bi * z0;
    P.ell_z -= bi * pc.x0[i];
    c += bi * pc.x0[i] * z0;
  }
  // <p, (x,z) - (x0,z0)> + u0
  for (std::size_t i = 0; i < n; ++i) {
    P.ell_x[i] += pc.p[static_cast<Eigen::Index>(i)];
    c -= pc.p[static_cast<Eigen::Index>(i)] * pc.x0[i];
  }
  P.ell_z += pc.p[N];
  c -= pc.p[N] * z0;
  P.ell0 = c + pc.u0;
  return P;
}

PucciPair pucci(const Eigen::MatrixXd& M, double lambda, double Lambda) {
  if (M.rows() != M.cols()) throw std::invalid_argument("pucci: matrix must be square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("pucci: matrix must be symmetric");
  if (!(lambda > 0.0 && Lambda >= lambda)) throw std::invalid_argument("pucci: need 0 < lambda <= Lambda");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  double pos = 0.0, neg = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()[i];
    (e > 0.0 ? pos : neg) += e;
  }
  return {lambda * pos + Lambda * neg, Lambda * pos + lambda * neg};
}

namespace {

void require_xz(const GridFunction& U) {
  if (U.mesh().dim() != 2) throw std::invalid_argument("expected a grid on (x, z)");
}

std::pair<double, double> cell(const Axis& a, std::size_t i) {
  const double lo = i == 0 ? a[0] : 0.5 * (a[i - 1] + a[i]);
  const double hi = i + 1 == a.size() ? a.back() : 0.5 * (a[i] + a[i + 1]);
  return {lo, hi};
}

}  // namespace

double node_measure(const MAGeometry& g, const TensorMesh& mesh, std::size_t node) {
  const auto [i, j] = mesh.multi_index(node);
  const auto [xl, xh] = cell(mesh.axis(0), i);
  const auto [zl, zh] = cell(mesh.axis(1), j);
  return (xh - xl) * g.mu_h(zl, zh);
}

ContactReport slide_paraboloids(const MAGeometry& g, const GridFunction& U, const std::vector<std::size_t>& vertices,
                                double a) {
  require_xz(U);
  if (!(a > 0.0)) throw std::invalid_argument("slide_paraboloids: opening must be > 0");
  const TensorMesh& mesh = U.mesh();
  const std::size_t N = mesh.size();
  for (auto v : vertices)
    if (v >= N) throw std::out_of_range("slide_paraboloids: vertex outside the grid");
  const double tol = 1e-12 * (U.max_abs() + 1.0);

  ContactReport rep;
  rep.vertices = vertices;
  rep.touching_value.assign(vertices.size(), 0.0);
  rep.contacts.assign(vertices.size(), {});
  std::vector<double> gaps(vertices.size(), 0.0), cgaps(vertices.size(), 0.0);
  parallel_for(vertices.size(), [&](std::size_t k) {
    const auto pv = mesh.point(vertices[k]);
    const double xv[1] = {pv[0]};
    std::vector<double> cand(N);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < N; ++q) {
      const auto pq = mesh.point(q);
      const double xq[1] = {pq[0]};
      cand[q] = U[q] + a * g.delta_Phi(xv, pv[1], xq, pq[1]);
      best = std::min(best, cand[q]);
    }
    rep.touching_value[k] = best;
    double gap = std::numeric_limits<double>::infinity(), cgap = 0.0;
    for (std::size_t q = 0; q < N; ++q) {
      // U - P_v = cand - best.
      const double d = cand[q] - best;
      gap = std::min(gap, d);
      if (d <= tol) {
        rep.contacts[k].push_back(q);
        cgap = std::max(cgap, std::abs(d));
      }
    }
    gaps[k] = gap;
    cgaps[k] = cgap;
  });
  for (const auto& c : rep.contacts) rep.contact_set.insert(rep.contact_set.end(), c.begin(), c.end());
  std::sort(rep.contact_set.begin(), rep.contact_set.end());
  rep.contact_set.erase(std::unique(rep.contact_set.begin(), rep.contact_set.end()), rep.contact_set.end());
  for (auto q : rep.contact_set) rep.mu_A += node_measure(g, mesh, q);
  std::vector<std::size_t> B = vertices;
  std::sort(B.begin(), B.end());
  B.erase(std::unique(B.begin(), B.end()), B.end());
  for (auto v : B) rep.mu_B += node_measure(g, mesh, v);
  rep.ratio = rep.mu_B > 0.0 ? rep.mu_A / rep.mu_B : 0.0;
  rep.min_gap = gaps.empty() ? 0.0 : *std::min_element(gaps.begin(), gaps.end());
  rep.max_contact_gap = cgaps.empty() ? 0.0 : *std::max_element(cgaps.begin(), cgaps.end());
  return rep;
}

namespace {

// Lower envelope of f_i + (p - q_i)^2 / eps at sorted query points p.
void envelope_1d(const std::vector<double>& q, const std::vector<double>& f, const std::vector<double>& p,
                 double eps, std::vector<double>& out, std::vector<std::size_t>& arg) {
  const std::size_t n = q.size();
  std::vector<std::size_t> hull(n);
  std::vector<double> from(n + 1);
  auto meet = [&](std::size_t i, std::size_t j) {
    return (eps * (f[j] - f[i]) + q[j] * q[j] - q[i] * q[i]) / (2.0 * (q[j] - q[i]));
  };
  std::size_t k = 0;
  hull[0] = 0;
  from[0] = -std::numeric_limits<double>::infinity();
  from[1] = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i) {
    double x = meet(hull[k], i);
    while (x <= from[k]) {
      --k;
      x = meet(hull[k], i);
    }
    ++k;
    hull[k] = i;
    from[k] = x;
    from[k + 1] = std::numeric_limits<double>::infinity();
  }
  out.resize(p.size());
  arg.resize(p.size());
  std::size_t c = 0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    while (from[c + 1] < p[m]) ++c;
    const std::size_t i = hull[c];
    const double d = p[m] - q[i];
    out[m] = f[i] + d * d / eps;
    arg[m] = i;
  }
}

}  // namespace

InfConvolution inf_convolution(const GridFunction& U, double eps) {
  require_xz(U);
  if (!(eps > 0.0)) throw std::invalid_argument("inf_convolution: eps must be > 0");
  const TensorMesh& mesh = U.mesh();
  const Axis& X = mesh.axis(0);
  const Axis& Z = mesh.axis(1);
  const std::size_t nx = X.size(), nz = Z.size();
  // Pass 1 along z for every x column.
  std::vector<double> col(nz), tmp(nz * nx);
  std::vector<std::size_t> zarg(nz * nx), a1;
  std::vector<double> o1;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nz; ++j) col[j] = U[mesh.index(i, j)];
    envelope_1d(Z, col, Z, eps, o1, a1);
    for (std::size_t j = 0; j < nz; ++j) {
      tmp[j * nx + i] = o1[j];
      zarg[j * nx + i] = a1[j];
    }
  }
  // Pass 2 along x for every z row.
  InfConvolution r{GridFunction(mesh), std::vector<std::size_t>(mesh.size())};
  std::vector<double> row(nx);
  for (std::size_t j = 0; j < nz; ++j) {
    for (std::size_t i = 0; i < nx; ++i) row[i] = tmp[j * nx + i];
    envelope_1d(X, row, X, eps, o1, a1);
    for (std::size_t i = 0; i < nx; ++i) {
      r.value[mesh.index(i, j)] = o1[i];
      r.argmin[mesh.index(i, j)] = mesh.index(a1[i], zarg[j * nx + a1[i]]);
    }
  }
  return r;
}

InfConvolution inf_convolution_bruteforce(const GridFunction& U, double eps) {
  require_xz(U);
  const TensorMesh& mesh = U.mesh();
  InfConvolution r{GridFunction(mesh), std::vector<std::size_t>(mesh.size())};
  for (std::size_t p = 0; p < mesh.size(); ++p) {
    const auto pp = mesh.point(p);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t q = 0; q < mesh.size(); ++q) {
      const auto pq = mesh.point(q);
      const double v = U[q] + ((pp[0] - pq[0]) * (pp[0] - pq[0]) + (pp[1] - pq[1]) * (pp[1] - pq[1])) / eps;
      if (v < best) {
        best = v;
        arg = q;
      }
    }
    r.value[p] = best;
    r.argmin[p] = arg;
  }
  return r;
}

double max_second_difference(const GridFunction& U) {
  require_xz(U);
  const TensorMesh& mesh = U.mesh();
  double worst = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < 2; ++d) {
    const Axis& a = mesh.axis(d);
    const std::size_t other = mesh.extent(1 - d);
    for (std::size_t o = 0; o < other; ++o)
      for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        auto at = [&](std::size_t k) { return d == 0 ? U[mesh.index(k, o)] : U[mesh.index(o, k)]; };
        const double hm = a[i] - a[i - 1], hp = a[i + 1] - a[i];
        const double dd = 2.0 * (hm * (at(i + 1) - at(i)) - hp * (at(i) - at(i - 1))) / (hm * hp * (hm + hp));
        worst = std::max(worst, dd);
      }
  }
  return worst;
}

TouchReport touch_test(const MAGeometry& g, const GridFunction& U, std::size_t x0_index, double R,
                       const TouchLattice& L) {
  require_xz(U);
  if (!(R > 0.0)) throw std::invalid_argument("touch_test: R must be > 0");
  const TensorMesh& mesh = U.mesh();
  const Axis& X = mesh.axis(0);
  const Axis& Z = mesh.axis(1);
  if (x0_index >= X.size()) throw std::out_of_range("touch_test: x0 index outside the grid");
  const auto j0it = std::find(Z.begin(), Z.end(), 0.0);
  if (j0it == Z.end()) throw std::invalid_argument("touch_test: grid has no z = 0 row");
  const auto j0 = static_cast<std::size_t>(j0it - Z.begin());
  const double x0 = X[x0_index];
  const double u0 = U[mesh.index(x0_index, j0)];
  const double tol = 1e-12 * (U.max_abs() + 1.0);

  std::vector<std::size_t> xs;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (0.5 * (X[i] - x0) * (X[i] - x0) < R) xs.push_back(i);
  std::vector<std::size_t> zs;
  for (std::size_t j = j0 + 1; j < Z.size(); ++j)
    if (g.h(Z[j]) < R) zs.push_back(j);
  if (zs.empty()) throw std::invalid_argument("touch_test: no z > 0 nodes inside the section");

  auto steps = [](double lo, double hi, std::size_t n, std::size_t k) {
    return n <= 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  };
  TouchReport rep;
  rep.slope_exact = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < L.q1_steps; ++a)
    for (std::size_t b = 0; b < L.q2_steps; ++b) {
      const double q1 = steps(L.q1_min, L.q1_max, L.q1_steps, a);
      const double q2 = steps(L.q2_min, L.q2_max, L.q2_steps, b);
      auto P = [&](double x) { return u0 + q1 * (x - x0) + 0.5 * q2 * (x - x0) * (x - x0); };
      bool above = true;
      for (auto i : xs)
        if (P(X[i]) < U[mesh.index(i, j0)] - tol) {
          above = false;
          break;
        }
      if (!above) continue;
      ++rep.candidates;
      double need = -std::numeric_limits<double>::infinity();
      for (auto i : xs)
        for (auto j : zs) need = std::max(need, (U[mesh.index(i, j)] - P(X[i])) / Z[j]);
      if (need < rep.slope_exact) {
        rep.slope_exact = need;
        rep.q1 = q1;
        rep.q2 = q2;
      }
    }
  rep.found = rep.candidates > 0;
  if (rep.found) rep.slope_lattice = std::ceil(rep.slope_exact / L.slope_step - 1e-9) * L.slope_step;
  return rep;
}

}  // namespace fraclab
