#include "fraclab/io/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fraclab::io {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string cell(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const DecayPolynomial& p) {
  return {{"order", p.order}, {"c", num(p.c)}, {"b", num(p.b)}, {"A", num(p.A)}, {"d", num(p.d)}};
}

json to_json(const DecayReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"j", l.j}, {"r", num(l.r)}, {"nodes", l.nodes}, {"error", num(l.error)},
                      {"used", l.used}, {"polynomial", to_json(l.poly)}});
  return {{"order", r.order},
          {"rho", num(r.rho)},
          {"levels", levels},
          {"increments", {{"c", nums(r.inc_c)}, {"b", nums(r.inc_b)}, {"A", nums(r.inc_A)}, {"d", nums(r.inc_d)}}},
          {"noise_floor", num(r.noise_floor)},
          {"exponent", num(r.exponent)},
          {"prefactor", num(r.prefactor)},
          {"used", r.used},
          {"warning", r.warning}};
}

json to_json(const CampanatoReport& r) {
  json steps = json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"k", s.k},
                     {"corrector", to_json(s.corrector)},
                     {"accumulated", to_json(s.accumulated)},
                     {"normalized_error", num(s.normalized_error)}});
  return {{"order", r.order}, {"rho", num(r.rho)},        {"exponent", num(r.exponent)}, {"steps", steps},
          {"limit", to_json(r.limit)}, {"D_hat", num(r.D_hat)}, {"warning", r.warning}};
}

json to_json(const HarnackReport& r) {
  return {{"x0", num(r.x0)},         {"R", num(r.R)},           {"kappa", num(r.kappa)},
          {"sup", num(r.sup)},       {"inf", num(r.inf)},       {"data_f", num(r.data_f)},
          {"data_F", num(r.data_F)}, {"Q", num(r.Q)},           {"nodes", r.nodes}};
}

json to_json(const HarnackSweep& r) {
  json reports = json::array();
  for (const auto& h : r.reports) reports.push_back(to_json(h));
  return {{"C_hat", num(r.C_hat)}, {"reports", reports}};
}

json to_json(const BarrierVerification& v) {
  return {{"annulus_samples", v.annulus_samples}, {"min_bracket", num(v.min_bracket)},
          {"annulus_positive", v.annulus_positive}, {"dz_at_trace", num(v.dz_at_trace)},
          {"inner_min", num(v.inner_min)},         {"inner_max", num(v.inner_max)},
          {"outer_max", num(v.outer_max)},         {"passed", v.passed}};
}

json to_json(const CaseTwoProfile& p) {
  return {{"s", num(p.s)},
          {"n", p.n},
          {"eps", num(p.eps)},
          {"z_top", num(p.z_top)},
          {"z_bump", num(p.z_bump)},
          {"z_support", num(p.z_support)},
          {"width", num(p.width)},
          {"mu", num(p.mu)},
          {"slope", num(p.slope)},
          {"C1_hat", num(p.C1_hat)},
          {"C2_hat", num(p.C2_hat)},
          {"psi_mass_ratio", num(p.psi_mass_ratio)},
          {"samples", {{"z", nums(p.z)}, {"psi", nums(p.psi)}, {"h_eps", nums(p.h_eps)}, {"dh_eps", nums(p.dh_eps)}}}};
}

json to_json(const ContactReport& r) {
  std::size_t contacts = 0;
  for (const auto& c : r.contacts) contacts += c.size();
  return {{"vertices", r.vertices.size()},
          {"contact_nodes", r.contact_set.size()},
          {"contact_pairs", contacts},
          {"mu_A", num(r.mu_A)},
          {"mu_B", num(r.mu_B)},
          {"ratio", num(r.ratio)},
          {"min_gap", num(r.min_gap)},
          {"max_contact_gap", num(r.max_contact_gap)}};
}

json to_json(const QuasiTriangleReport& r) {
  return {{"K_hat", num(r.K_hat)}, {"samples", r.samples}, {"dimension", r.dimension}};
}

json to_json(const ScalingReport& r) {
  return {{"max_h_error", num(r.max_h_error)},
          {"max_dh_error", num(r.max_dh_error)},
          {"membership_mismatches", r.membership_mismatches},
          {"samples", r.samples}};
}

json to_json(const QuotientReport& r) {
  return {{"min_quotient", num(r.min_quotient)},
          {"argmin_z", num(r.argmin_z)},
          {"argmin_z0", num(r.argmin_z0)},
          {"samples", r.samples}};
}

json to_json(const EngulfingReport& r) {
  auto part = [](const EngulfingComponent& c) {
    return json{{"C_hat", num(c.C_hat)}, {"p_hat", num(c.p_hat)}, {"violations", c.violations}};
  };
  return {{"x", part(r.x)}, {"z", part(r.z)}, {"samples", r.samples}};
}

json to_json(const DoublingReport& r) {
  return {{"min_ratio", num(r.min_ratio)}, {"max_ratio", num(r.max_ratio)}, {"ratios", nums(r.ratios)}};
}

json to_json(const FractionalRegularityReport& r) {
  return {{"gamma", num(r.gamma)},
          {"first_derivative", r.first_derivative},
          {"u_sup", num(r.u_sup)},
          {"sub_sup", num(r.sub_sup)},
          {"sub_grad_sup", num(r.sub_grad_sup)},
          {"sub_seminorm", num(r.sub_seminorm)},
          {"subdomain_norm", num(r.subdomain_norm)},
          {"f_sup", num(r.f_sup)},
          {"f_holder", num(r.f_holder)},
          {"ratio", num(r.ratio)}};
}

json to_json(const ExtremaReport& r) {
  return {{"interior_max", num(r.interior_max)}, {"interior_min", num(r.interior_min)},
          {"boundary_max", num(r.boundary_max)}, {"boundary_min", num(r.boundary_min)},
          {"max_excess", num(r.max_excess())},   {"min_excess", num(r.min_excess())}};
}

std::string decay_csv(const DecayReport& r) {
  std::ostringstream os;
  os << "j,r,nodes,error,used,c,b,A,d\n";
  for (const auto& l : r.levels)
    os << l.j << ',' << cell(l.r) << ',' << l.nodes << ',' << cell(l.error) << ',' << (l.used ? 1 : 0) << ','
       << cell(l.poly.c) << ',' << cell(l.poly.b) << ',' << cell(l.poly.A) << ',' << cell(l.poly.d) << '\n';
  return os.str();
}

std::string harnack_csv(const HarnackSweep& r) {
  std::ostringstream os;
  os << "fixture,R,kappa,sup,inf,data_f,data_F,Q,nodes\n";
  for (std::size_t i = 0; i < r.reports.size(); ++i) {
    const auto& h = r.reports[i];
    os << i << ',' << cell(h.R) << ',' << cell(h.kappa) << ',' << cell(h.sup) << ',' << cell(h.inf) << ','
       << cell(h.data_f) << ',' << cell(h.data_F) << ',' << cell(h.Q) << ',' << h.nodes << '\n';
  }
  return os.str();
}

}  // namespace fraclab::io
