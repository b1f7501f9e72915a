#include "fraclab/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fraclab {

namespace {

Eigen::VectorXd weighted_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd Aw = sw.asDiagonal() * A;
  return Aw.colPivHouseholderQr().solve(sw.cwiseProduct(y));
}

struct LawsonResult {
  Eigen::VectorXd coef;
  double sup_error;
  int iterations;
  Eigen::VectorXd weights;
};

LawsonResult lawson(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, int max_iterations, double tol) {
  const Eigen::Index m = A.rows();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  LawsonResult best{weighted_ls(A, y, w), 0.0, 0, w};
  Eigen::VectorXd r = (A * best.coef - y).cwiseAbs();
  best.sup_error = r.maxCoeff();
  const double floor = 1e-14 / static_cast<double>(m);
  double previous = best.sup_error;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd nw = w.cwiseProduct(r);
    const double total = nw.sum();
    if (!(total > 0.0)) break;
    w = (nw / total).cwiseMax(floor);
    const Eigen::VectorXd c = weighted_ls(A, y, w);
    r = (A * c - y).cwiseAbs();
    const double e = r.maxCoeff();
    if (e < best.sup_error) {
      best.coef = c;
      best.sup_error = e;
      best.weights = w;
    }
    best.iterations = it;
    if (e == 0.0 || std::abs(previous - e) <= tol * std::max(e, 1e-300)) break;
    previous = e;
  }
  return best;
}

// Levelled solution on a reference of n + 1 rows: A_S c - y_S = -sign(l) E
// with l spanning the null space of A_S^T, so E = l.y_S / |l|_1 is the exact
// minimax error on S.  Empty when the reference is degenerate.
struct Levelled {
  Eigen::VectorXd coef;
  double E = 0.0;
  bool ok = false;
};

Levelled levelled(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const std::vector<Eigen::Index>& S) {
  const Eigen::Index n = A.cols(), k = static_cast<Eigen::Index>(S.size());
  Eigen::MatrixXd As(k, n);
  Eigen::VectorXd ys(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    As.row(i) = A.row(S[static_cast<std::size_t>(i)]);
    ys[i] = y[S[static_cast<std::size_t>(i)]];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(As.transpose(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() < n || !(sv[n - 1] > 1e-10 * std::max(sv[0], 1e-300))) return {};
  const Eigen::VectorXd l = svd.matrixV().col(k - 1);
  const double norm1 = l.cwiseAbs().sum();
  if (!(norm1 > 0.0)) return {};
  Eigen::MatrixXd M(k, n + 1);
  M.leftCols(n) = As;
  for (Eigen::Index i = 0; i < k; ++i) M(i, n) = l[i] >= 0.0 ? 1.0 : -1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (lu.rank() < n + 1) return {};
  const Eigen::VectorXd sol = lu.solve(ys);
  return {sol.head(n), std::abs(sol[n]), true};
}

// Exchange ascent on the dual of min_c max_i |A_i c - y_i|: swap the worst
// row into the reference, keeping the swap with the largest levelled error.
// The error increases strictly, so the loop terminates.
bool polish(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
            Eigen::VectorXd& coef, double& sup_error) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (m <= n) return false;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return weights[a] > weights[b]; });
  // Heaviest rows that keep A_S of full column rank, then the next heaviest.
  std::vector<Eigen::Index> S;
  Eigen::MatrixXd basis(0, n);
  for (Eigen::Index i : order) {
    if (static_cast<Eigen::Index>(S.size()) == n) break;
    Eigen::MatrixXd trial(basis.rows() + 1, n);
    trial << basis, A.row(i);
    if (Eigen::FullPivLU<Eigen::MatrixXd>(trial).rank() == trial.rows()) {
      basis = trial;
      S.push_back(i);
    }
  }
  if (static_cast<Eigen::Index>(S.size()) < n) return false;
  for (Eigen::Index i : order)
    if (std::find(S.begin(), S.end(), i) == S.end()) {
      S.push_back(i);
      break;
    }
  Levelled cur = levelled(A, y, S);
  if (!cur.ok) return false;
  const double scale = y.cwiseAbs().maxCoeff() + 1e-300;
  for (int step = 0; step < 10 * static_cast<int>(m); ++step) {
    const Eigen::VectorXd r = (A * cur.coef - y).cwiseAbs();
    Eigen::Index worst = 0;
    const double full = r.maxCoeff(&worst);
    if (full <= cur.E + 1e-14 * scale) {
      coef = cur.coef;
      sup_error = full;
      return true;
    }
    Levelled best;
    std::vector<Eigen::Index> best_S;
    for (std::size_t out = 0; out < S.size(); ++out) {
      auto T = S;
      T[out] = worst;
      const Levelled t = levelled(A, y, T);
      if (t.ok && (!best.ok || t.E > best.E)) {
        best = t;
        best_S = std::move(T);
      }
    }
    if (!best.ok || best.E <= cur.E) return false;
    cur = best;
    S = std::move(best_S);
  }
  return false;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& A, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), A.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = A.row(rows[k]);
  return out;
}

}  // namespace

MinimaxFit minimax_fit(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, int max_iterations, double tol) {
  if (A.rows() != y.size() || A.rows() == 0 || A.cols() == 0)
    throw std::invalid_argument("minimax_fit: need a nonempty system with matching sizes");
  const Eigen::Index m = A.rows();
  MinimaxFit out;
  const Eigen::VectorXd ls = A.colPivHouseholderQr().solve(y);
  Eigen::VectorXd r = (A * ls - y).cwiseAbs();
  out.ls_sup_error = r.maxCoeff();

  constexpr Eigen::Index direct_limit = 512, batch = 64;
  if (m <= direct_limit) {
    const auto fit = lawson(A, y, max_iterations, tol);
    out.coef = fit.coef;
    out.sup_error = fit.sup_error;
    out.iterations = fit.iterations;
    out.rounds = 1;
    Eigen::VectorXd c;
    double e = 0.0;
    if (polish(A, y, fit.weights, c, e) && e <= out.sup_error) {
      out.coef = c;
      out.sup_error = e;
    }
    return out;
  }

  // Working set: an even spread of rows plus the worst least-squares rows.
  std::vector<char> in(static_cast<std::size_t>(m), 0);
  std::vector<Eigen::Index> rows;
  auto add = [&](Eigen::Index i) {
    if (!in[static_cast<std::size_t>(i)]) {
      in[static_cast<std::size_t>(i)] = 1;
      rows.push_back(i);
    }
  };
  for (Eigen::Index k = 0; k < 256; ++k) add(k * (m - 1) / 255);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  auto add_worst = [&](const Eigen::VectorXd& res, double above) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto cut = order.begin() + std::min<Eigen::Index>(batch, m);
    std::partial_sort(order.begin(), cut, order.end(), [&](Eigen::Index a, Eigen::Index b) { return res[a] > res[b]; });
    std::size_t added = 0;
    for (auto it = order.begin(); it != cut; ++it)
      if (res[*it] > above && !in[static_cast<std::size_t>(*it)]) {
        add(*it);
        ++added;
      }
    return added;
  };
  add_worst(r, -1.0);

  for (int round = 1; round <= 200; ++round) {
    Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) ys[static_cast<Eigen::Index>(k)] = y[rows[k]];
    const auto fit = lawson(take_rows(A, rows), ys, max_iterations, tol);
    r = (A * fit.coef - y).cwiseAbs();
    const double full = r.maxCoeff();
    out.iterations += fit.iterations;
    out.rounds = round;
    if (out.coef.size() == 0 || full < out.sup_error) {
      out.coef = fit.coef;
      out.sup_error = full;
    }
    if (full <= fit.sup_error * (1.0 + 1e-9) || add_worst(r, fit.sup_error) == 0) {
      // Lawson weights of the working set seed the exchange on all rows.
      Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
      for (std::size_t k = 0; k < rows.size(); ++k) w[rows[k]] = fit.weights[static_cast<Eigen::Index>(k)];
      Eigen::VectorXd c;
      double e = 0.0;
      if (polish(A, y, w, c, e) && e <= out.sup_error) {
        out.coef = c;
        out.sup_error = e;
      }
      break;
    }
  }
  return out;
}

}  // namespace fraclab
