#include "fraclab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fraclab/fitting.hpp"
#include "fraclab/minimax.hpp"
#include "fraclab/parallel.hpp"

namespace fraclab {

std::vector<std::size_t> cylinder_nodes(const MAGeometry& g, const TensorMesh& mesh, double x0, double Rx,
                                        double Rz) {
  if (mesh.dim() != 2) throw std::invalid_argument("cylinder_nodes: expected an (x, z) mesh");
  const Axis& X = mesh.axis(0);
  const Axis& Z = mesh.axis(1);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double dx = X[i] - x0;
    if (!(0.5 * dx * dx < Rx)) continue;
    for (std::size_t j = 0; j < Z.size(); ++j)
      if (Z[j] >= 0.0 && g.h(Z[j]) < Rz) out.push_back(mesh.index(i, j));
  }
  return out;
}

double holder_seminorm_MA(const MAGeometry& g, const GridFunction& U, const std::vector<std::size_t>& region,
                          double beta, const HolderOptions& options) {
  if (!(beta > 0.0 && beta < 2.0)) throw std::invalid_argument("holder_seminorm_MA: beta must lie in (0,2)");
  const TensorMesh& mesh = U.mesh();
  if (mesh.dim() != 2) throw std::invalid_argument("holder_seminorm_MA: expected an (x, z) grid");
  const std::size_t n = region.size();
  if (n < 2) return 0.0;
  std::vector<double> px(n), pz(n), pu(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (region[k] >= mesh.size()) throw std::out_of_range("holder_seminorm_MA: region node outside the grid");
    const auto p = mesh.point(region[k]);
    px[k] = p[0];
    pz[k] = p[1];
    pu[k] = U[region[k]];
  }
  const double half = beta / 2.0;
  auto ratio = [&](std::size_t a, std::size_t b) {
    const double dx = px[b] - px[a];
    const double d = 0.5 * dx * dx + g.delta_h(pz[a], pz[b]);
    if (!(d > 0.0)) return 0.0;
    return std::abs(pu[b] - pu[a]) / std::pow(d, half);
  };

  if (n * (n - 1) <= options.pair_cap) {
    std::vector<double> best(n, 0.0);
    parallel_for(n, [&](std::size_t a) {
      double m = 0.0;
      for (std::size_t b = 0; b < n; ++b)
        if (b != a) m = std::max(m, ratio(a, b));
      best[a] = m;
    });
    return *std::max_element(best.begin(), best.end());
  }

  // Over the cap: a seeded candidate pool, thinned to equal shares per decade.
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::map<int, std::vector<std::pair<std::size_t, std::size_t>>> decades;
  const std::size_t pool = 4 * options.pair_cap;
  for (std::size_t t = 0; t < pool; ++t) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const double dx = px[b] - px[a];
    const double d = 0.5 * dx * dx + g.delta_h(pz[a], pz[b]);
    if (!(d > 0.0)) continue;
    decades[static_cast<int>(std::floor(std::log10(d)))].emplace_back(a, b);
  }
  if (decades.empty()) return 0.0;
  const std::size_t quota = std::max<std::size_t>(1, options.pair_cap / decades.size());
  double m = 0.0;
  for (const auto& [decade, pairs] : decades)
    for (std::size_t t = 0; t < std::min(quota, pairs.size()); ++t) m = std::max(m, ratio(pairs[t].first, pairs[t].second));
  return m;
}

HarnackReport harnack_quotient(const ExtensionState& st, double x0, double R, double kappa) {
  if (st.x.dim() != 1) throw std::invalid_argument("harnack_quotient: one lateral dimension only");
  if (!(R > 0.0) || !(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("harnack_quotient: need R > 0 and 0 < kappa < 1");
  const MAGeometry g(st.s);
  const Axis& X = st.x.axis(0);
  const double half = std::sqrt(2.0 * R);
  if (x0 - half < X.front() || x0 + half > X.back() || g.h(std::abs(st.z.back())) < R)
    throw std::invalid_argument("harnack_quotient: S_R leaves the solved domain");

  HarnackReport rep;
  rep.x0 = x0;
  rep.R = R;
  rep.kappa = kappa;
  rep.sup = -std::numeric_limits<double>::infinity();
  rep.inf = std::numeric_limits<double>::infinity();
  const std::size_t j0 = st.zero_row();
  double fsup = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double dx = X[i] - x0;
    const double dphi = 0.5 * dx * dx;
    if (!(dphi < R)) continue;
    fsup = std::max(fsup, std::abs(st.flux[i]));
    for (std::size_t j = j0; j < st.nz(); ++j) {
      const double d = dphi + g.h(st.z[j]);
      if (!(d < R)) continue;
      const double u = st.at(i, j);
      if (u < 0.0) {
        std::ostringstream msg;
        msg << "harnack_quotient: U = " << u << " < 0 at x = " << X[i] << ", z = " << st.z[j];
        throw std::invalid_argument(msg.str());
      }
      if (d < kappa * R) {
        rep.sup = std::max(rep.sup, u);
        rep.inf = std::min(rep.inf, u);
        ++rep.nodes;
      }
    }
  }
  if (rep.nodes == 0) throw std::invalid_argument("harnack_quotient: no nodes in S_{kappa R}");
  rep.data_f = fsup * std::pow(R, st.s);
  rep.data_F = st.rhs_sup * R;
  const double den = rep.inf + rep.data_f + rep.data_F;
  rep.Q = den > 0.0 ? rep.sup / den : std::numeric_limits<double>::infinity();
  return rep;
}

ApproximationReport approximation_distance(double eps0, const ApproximationInstance& in) {
  if (!in.boundary) throw std::invalid_argument("approximation_distance: boundary data required");
  const double s = in.s;
  const MAGeometry g(s);
  const double L = std::sqrt(2.0);
  const double Z = section_constant(s);  // h(Z) = 1
  const ExtensionMesh mesh = make_extension_mesh(TensorMesh({uniform_axis(-L, L, in.x_cells)}), s, Z, in.y_cells);

  auto shape = [](double x) { return std::cos(std::numbers::pi * x / (2.0 * std::numbers::sqrt2)); };
  ApproximationReport rep;
  double fsup = 0.0;
  for (double x : mesh.x.axis(0)) fsup = std::max(fsup, std::abs(in.f_eps * shape(x)));
  rep.perturbation = std::abs(in.coefficient_eps) + fsup + std::abs(in.F_eps);
  if (rep.perturbation > eps0) {
    std::ostringstream msg;
    msg << "approximation_distance: measured perturbation " << rep.perturbation << " exceeds eps0 = " << eps0;
    throw std::invalid_argument(msg.str());
  }

  auto lateral = [&](double x, double, double z) { return in.boundary(x, z); };
  ExtensionProblem harmonic;
  harmonic.s = s;
  harmonic.bottom_data = [](double, double) { return 0.0; };
  harmonic.dirichlet = lateral;
  ExtensionProblem perturbed = harmonic;
  const double a11 = 1.0 + in.coefficient_eps;
  perturbed.a = CoefficientField::constant(1, {a11, 0.0, 1.0}, std::min(1.0, a11), std::max(1.0, a11));
  perturbed.bottom_data = [&](double x, double) { return in.f_eps * shape(x); };
  if (in.F_eps != 0.0) perturbed.rhs = [&](double, double, double) { return in.F_eps; };

  const ExtensionState U = solve_extension(perturbed, mesh);
  const ExtensionState H = solve_extension(harmonic, mesh);
  rep.residual = std::max({U.interior_residual, U.neumann_residual, H.interior_residual, H.neumann_residual});
  const GridFunction gu = to_grid_function(U);
  for (std::size_t k : cylinder_nodes(g, gu.mesh(), 0.0, 0.75, 0.75))
    rep.distance = std::max(rep.distance, std::abs(U.U[k] - H.U[k]));
  return rep;
}

double DecayPolynomial::operator()(const MAGeometry& g, double x, double z) const {
  return c + b * x + 0.5 * A * x * x + d * g.h(z);
}

MAPolynomial DecayPolynomial::as_ma_polynomial() const {
  MAPolynomial p = MAPolynomial::zero(2, 1);
  p.A = {A};
  p.d = d;
  p.ell0 = c;
  p.ell_x = {b};
  return p;
}

int schauder_order(double alpha, double s) {
  const double e = alpha + 2.0 * s;
  if (!(e > 0.0) || e >= 3.0 || e == 1.0 || e == 2.0) {
    std::ostringstream msg;
    msg << "schauder_order: alpha + 2s = " << e << " must lie in (0,1), (1,2) or (2,3)";
    throw std::invalid_argument(msg.str());
  }
  return e < 1.0 ? 0 : e < 2.0 ? 1 : 2;
}

namespace {

std::size_t basis_size(int order) { return order == 0 ? 1 : order == 1 ? 2 : 4; }

// Minimax fit over the listed nodes in columns scaled to the level r.
std::pair<DecayPolynomial, double> fit_level(const MAGeometry& g, const TensorMesh& mesh,
                                             const std::vector<double>& values,
                                             const std::vector<std::size_t>& nodes, int order, double r) {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  const auto nb = static_cast<Eigen::Index>(basis_size(order));
  Eigen::MatrixXd A(m, nb);
  Eigen::VectorXd y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto p = mesh.point(nodes[static_cast<std::size_t>(k)]);
    const double xs = p[0] / r;
    A(k, 0) = 1.0;
    if (order >= 1) A(k, 1) = xs;
    if (order >= 2) {
      A(k, 2) = 0.5 * xs * xs;
      A(k, 3) = g.h(p[1]) / (r * r);
    }
    y[k] = values[nodes[static_cast<std::size_t>(k)]];
  }
  const MinimaxFit fit = minimax_fit(A, y);
  DecayPolynomial poly;
  poly.order = order;
  poly.c = fit.coef[0];
  if (order >= 1) poly.b = fit.coef[1] / r;
  if (order >= 2) {
    poly.A = fit.coef[2] / (r * r);
    poly.d = fit.coef[3] / (r * r);
  }
  return {poly, fit.sup_error};
}

std::pair<std::size_t, std::size_t> distinct_counts(const TensorMesh& mesh, const std::vector<std::size_t>& nodes) {
  std::set<std::size_t> xs, zs;
  for (std::size_t k : nodes) {
    const auto mi = mesh.multi_index(k);
    xs.insert(mi[0]);
    zs.insert(mi[1]);
  }
  return {xs.size(), zs.size()};
}

double z_radius(int order, double rho, double r2) { return order == 2 ? r2 * rho : r2; }

void require_order(int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("order must be 0, 1 or 2");
}

void require_cylinder(const MAGeometry& g, const ExtensionState& st, double Rx, double Rz, const char* who) {
  const Axis& X = st.x.axis(0);
  const double half = std::sqrt(2.0 * Rx);
  if (-half < X.front() || half > X.back() || g.h(std::abs(st.z.back())) < Rz) {
    std::ostringstream msg;
    msg << who << ": the level-0 cylinder leaves the solved domain";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

DecayReport schauder_decay(const ExtensionState& st, int order, double rho, std::size_t depth,
                           const DecayOptions& opt) {
  require_order(order);
  if (st.x.dim() != 1) throw std::invalid_argument("schauder_decay: one lateral dimension only");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("schauder_decay: rho must lie in (0,1)");
  const MAGeometry g(st.s);
  require_cylinder(g, st, 1.0, z_radius(order, rho, 1.0), "schauder_decay");
  const GridFunction U = to_grid_function(st);

  DecayReport rep;
  rep.order = order;
  rep.rho = rho;
  std::vector<std::vector<std::size_t>> sets;
  for (std::size_t j = 0; j <= depth; ++j) {
    const double r = std::pow(rho, static_cast<double>(j));
    auto nodes = cylinder_nodes(g, U.mesh(), 0.0, r * r, z_radius(order, rho, r * r));
    const auto [nx, nz] = distinct_counts(U.mesh(), nodes);
    if (nx < std::max(opt.min_nodes_x, basis_size(order) + 1) || nz < opt.min_nodes_z) {
      std::ostringstream msg;
      msg << "ladder truncated at j = " << j << " of " << depth << ": " << nx << " x-nodes, " << nz
          << " z-nodes in the fit set";
      rep.warning = msg.str();
      break;
    }
    sets.push_back(std::move(nodes));
  }
  rep.levels.resize(sets.size());
  parallel_for(sets.size(), [&](std::size_t j) {
    DecayLevel& lv = rep.levels[j];
    lv.j = j;
    lv.r = std::pow(rho, static_cast<double>(j));
    lv.nodes = sets[j].size();
    std::tie(lv.poly, lv.error) = fit_level(g, U.mesh(), U.values(), sets[j], order, lv.r);
  });

  double umax = 0.0;
  for (double v : st.U) umax = std::max(umax, std::abs(v));
  const double residual = std::max(st.interior_residual, st.neumann_residual);
  rep.noise_floor = std::max(residual, opt.relative_floor) * umax;

  std::vector<double> rs, es;
  for (auto& lv : rep.levels) {
    lv.used = lv.j >= opt.first && lv.error >= opt.noise_factor * rep.noise_floor;
    if (lv.used) {
      rs.push_back(lv.r);
      es.push_back(lv.error);
    }
  }
  rep.used = rs.size();
  const PowerLaw fit = fit_power_law(rs, es);
  rep.exponent = fit.exponent;
  rep.prefactor = fit.prefactor;

  for (std::size_t j = 0; j + 1 < rep.levels.size(); ++j) {
    const auto& p = rep.levels[j].poly;
    const auto& q = rep.levels[j + 1].poly;
    const double r = rep.levels[j].r;
    rep.inc_c.push_back(std::abs(p.c - q.c));
    rep.inc_b.push_back(r * std::abs(p.b - q.b));
    rep.inc_A.push_back(r * r * std::abs(p.A - q.A));
    rep.inc_d.push_back(r * r * std::abs(p.d - q.d));
  }
  return rep;
}

CampanatoReport campanato_iterate(const ExtensionState& st, int order, double rho, std::size_t depth,
                                  double exponent) {
  require_order(order);
  if (st.x.dim() != 1) throw std::invalid_argument("campanato_iterate: one lateral dimension only");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("campanato_iterate: rho must lie in (0,1)");
  if (!(exponent > 0.0)) throw std::invalid_argument("campanato_iterate: exponent must be positive");
  const MAGeometry g(st.s);
  const double zr1 = z_radius(order, rho, 1.0);
  require_cylinder(g, st, 1.0, zr1, "campanato_iterate");

  // Fixed target: source nodes of S_1 x S_1^+ (z >= 0).
  RescaleTarget target;
  {
    Axis tx, tz;
    for (double x : st.x.axis(0))
      if (0.5 * x * x < 1.0) tx.push_back(x);
    for (double z : st.z)
      if (z >= 0.0 && g.h(z) < zr1) tz.push_back(z);
    target.x = TensorMesh({tx});
    target.z = tz;
  }
  const TensorMesh tmesh({target.x.axis(0), target.z});
  const GridFunction source = to_grid_function(st);
  const double rho2 = rho * rho;
  const auto fit_set = cylinder_nodes(g, tmesh, 0.0, rho2, z_radius(order, rho, rho2));

  CampanatoReport rep;
  rep.order = order;
  rep.rho = rho;
  rep.exponent = exponent;
  DecayPolynomial P;
  P.order = order;
  for (std::size_t k = 0; k < depth; ++k) {
    const double sigma = std::pow(rho, static_cast<double>(k));
    // Resolution of the source on the physical fit set S_{rho^{2(k+1)}}.
    const double R = sigma * sigma * rho2;
    const auto phys = cylinder_nodes(g, source.mesh(), 0.0, R, z_radius(order, rho, R));
    const auto [nx, nz] = distinct_counts(source.mesh(), phys);
    if (nx < basis_size(order) + 2 || nz < 3) {
      std::ostringstream msg;
      msg << "iteration truncated at k = " << k << " of " << depth << ": " << nx << " x-nodes, " << nz
          << " z-nodes at the physical scale";
      rep.warning = msg.str();
      break;
    }
    const ExtensionState V = rescale_solution(st, sigma, target);
    const double zs = std::pow(sigma, 2.0 * st.s);
    const double norm = std::pow(sigma, -exponent);
    std::vector<double> tilde(V.U.size());
    for (std::size_t i = 0; i < target.x.size(); ++i) {
      const double x = target.x.axis(0)[i];
      for (std::size_t j = 0; j < target.z.size(); ++j)
        tilde[V.index(i, j)] = norm * (V.at(i, j) - P(g, sigma * x, zs * target.z[j]));
    }
    CampanatoStep step;
    step.k = k;
    std::tie(step.corrector, step.normalized_error) = fit_level(g, tmesh, tilde, fit_set, order, rho);
    const double w = std::pow(sigma, exponent);
    P.c += w * step.corrector.c;
    P.b += w / sigma * step.corrector.b;
    P.A += w / (sigma * sigma) * step.corrector.A;
    P.d += w / (sigma * sigma) * step.corrector.d;
    step.accumulated = P;
    const Eigen::Vector4d inc(std::abs(w * step.corrector.c), sigma * std::abs(w / sigma * step.corrector.b),
                              sigma * sigma * std::abs(w / (sigma * sigma) * step.corrector.A),
                              sigma * sigma * std::abs(w / (sigma * sigma) * step.corrector.d));
    rep.D_hat = std::max(rep.D_hat, inc.maxCoeff() / w);
    rep.steps.push_back(step);
  }
  rep.limit = P;
  return rep;
}

double holder_seminorm_1d(const Axis& x, const std::vector<double>& v, double gamma, double a, double b) {
  if (x.size() != v.size()) throw std::invalid_argument("holder_seminorm_1d: size mismatch");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= a && x[i] <= b) idx.push_back(i);
  std::vector<double> best(idx.size(), 0.0);
  parallel_for(idx.size(), [&](std::size_t p) {
    double m = 0.0;
    for (std::size_t q = p + 1; q < idx.size(); ++q) {
      const double d = std::abs(x[idx[q]] - x[idx[p]]);
      if (d > 0.0) m = std::max(m, std::abs(v[idx[q]] - v[idx[p]]) / std::pow(d, gamma));
    }
    best[p] = m;
  });
  return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

FractionalRegularityReport end_to_end_fractional_regularity(const SemigroupStepper& L,
                                                            const FractionalRegularityProblem& pr) {
  const TensorMesh& mesh = L.mesh();
  if (mesh.dim() != 1 || !mesh.uniform())
    throw std::invalid_argument("end_to_end_fractional_regularity: uniform one-dimensional grid required");
  if (!(pr.f.mesh() == mesh)) throw std::invalid_argument("end_to_end_fractional_regularity: f lives on another grid");
  if (!(pr.alpha > 0.0 && pr.alpha < 1.0))
    throw std::invalid_argument("end_to_end_fractional_regularity: alpha must lie in (0,1)");
  const Axis& X = mesh.axis(0);
  if (!(pr.a < pr.b) || pr.a <= X.front() || pr.b >= X.back())
    throw std::invalid_argument("end_to_end_fractional_regularity: subdomain must lie strictly inside");
  const double e = pr.alpha + 2.0 * pr.s;
  if (e == 1.0 || e >= 2.0)
    throw std::invalid_argument("end_to_end_fractional_regularity: alpha + 2s must avoid 1 and stay below 2");

  FractionalRegularityReport rep;
  rep.first_derivative = e > 1.0;
  rep.gamma = rep.first_derivative ? e - 1.0 : e;
  rep.u = fractional_inverse(L, pr.f, pr.s, pr.quadrature).value;
  const auto& u = rep.u.values();
  rep.u_sup = rep.u.max_abs();
  rep.f_sup = pr.f.max_abs();
  rep.f_holder = pr.f_holder >= 0.0 ? pr.f_holder
                                    : holder_seminorm_1d(X, pr.f.values(), pr.alpha, X.front(), X.back());

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (X[i] >= pr.a && X[i] <= pr.b) idx.push_back(i);
  if (idx.size() < 3) throw std::invalid_argument("end_to_end_fractional_regularity: subdomain has < 3 nodes");
  const double dx = X[1] - X[0];
  Axis xs;
  std::vector<double> us, du;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const std::size_t i = idx[p];
    xs.push_back(X[i]);
    us.push_back(u[i]);
    double d;
    if (p == 0) d = (-3.0 * u[i] + 4.0 * u[i + 1] - u[i + 2]) / (2.0 * dx);
    else if (p + 1 == idx.size()) d = (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) / (2.0 * dx);
    else d = (u[i + 1] - u[i - 1]) / (2.0 * dx);
    du.push_back(d);
  }
  for (double v : us) rep.sub_sup = std::max(rep.sub_sup, std::abs(v));
  for (double v : du) rep.sub_grad_sup = std::max(rep.sub_grad_sup, std::abs(v));
  if (rep.first_derivative) {
    rep.sub_seminorm = holder_seminorm_1d(xs, du, rep.gamma, pr.a, pr.b);
    rep.subdomain_norm = rep.sub_sup + rep.sub_grad_sup + rep.sub_seminorm;
  } else {
    rep.sub_seminorm = holder_seminorm_1d(xs, us, rep.gamma, pr.a, pr.b);
    rep.subdomain_norm = rep.sub_sup + rep.sub_seminorm;
  }
  const double den = rep.u_sup + rep.f_sup + rep.f_holder;
  rep.ratio = den > 0.0 ? rep.subdomain_norm / den : 0.0;
  return rep;
}

}  // namespace fraclab
