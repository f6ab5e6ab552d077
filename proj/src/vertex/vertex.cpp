#include "cftlab/vertex.hpp"

#include <algorithm>
#include <cmath>

#include "cftlab/error.hpp"
#include "cftlab/ope.hpp"
#include "cftlab/wick_json.hpp"

namespace cftlab {

VertexDims vertex_dims(double sigma, double sigma_star, double b) {
  double l = sigma * sigma / 2 - sigma * b;
  double ls = sigma_star * sigma_star / 2 - sigma_star * b;
  return {l, ls, l - ls};
}

double StarProduct::total_charge() const {
  double s = 0.0;
  for (const auto& v : nodes) s += v.sigma + v.sigma_star;
  return s;
}

double StarProduct::lambda_q() const {
  Numerology n = Numerology::from_kappa(kappa);
  double s = total_charge();
  return (n.a - n.b) * s + s * s / 2;
}

namespace {

// One factor X^p with X = sum_v coef_v * var_v, at most two variables.
struct Factor {
  cplx base;
  double power;
  int var[2];
  double coef[2];
};

std::vector<Factor> factors_of(const StarProduct& sp) {
  const double a = Numerology::from_kappa(sp.kappa).a;
  std::vector<Factor> out;
  const int n = static_cast<int>(sp.nodes.size());
  for (int j = 0; j < n; ++j) {
    const auto& v = sp.nodes[j];
    require(!v.point.on_boundary(), ErrorKind::InvalidArgument, "star product nodes must be interior");
    cplx z = v.point.value();
    int zj = 2 * j, zbj = 2 * j + 1;
    out.push_back({z - std::conj(z), v.sigma * v.sigma_star, {zj, zbj}, {1.0, -1.0}});
    if (sp.insertion) {
      out.push_back({z, v.sigma * a, {zj, -1}, {1.0, 0.0}});
      out.push_back({std::conj(z), v.sigma_star * a, {zbj, -1}, {1.0, 0.0}});
    }
    for (int k = j + 1; k < n; ++k) {
      const auto& u = sp.nodes[k];
      cplx w = u.point.value();
      require(z != w, ErrorKind::CoincidentPoints, "star product nodes coincide");
      int zk = 2 * k, zbk = 2 * k + 1;
      out.push_back({z - w, v.sigma * u.sigma, {zj, zk}, {1.0, -1.0}});
      out.push_back({std::conj(z) - std::conj(w), v.sigma_star * u.sigma_star, {zbj, zbk}, {1.0, -1.0}});
      out.push_back({z - std::conj(w), v.sigma * u.sigma_star, {zj, zbk}, {1.0, -1.0}});
      out.push_back({std::conj(z) - w, v.sigma_star * u.sigma, {zbj, zk}, {1.0, -1.0}});
    }
  }
  std::erase_if(out, [](const Factor& f) { return f.power == 0.0; });
  return out;
}

}  // namespace

cplx star_correlator(const StarProduct& sp) {
  cplx value = 1.0;
  for (const auto& f : factors_of(sp)) value *= std::pow(f.base, f.power);
  return value;
}

StarJet star_jet(const StarProduct& sp) {
  const std::size_t dim = 2 * sp.nodes.size();
  StarJet jet{1.0, std::vector<cplx>(dim, 0.0), std::vector<cplx>(dim * dim, 0.0)};
  std::vector<cplx> g(dim, 0.0), h(dim * dim, 0.0);
  for (const auto& f : factors_of(sp)) {
    jet.value *= std::pow(f.base, f.power);
    cplx inv = 1.0 / f.base;
    for (int s = 0; s < 2; ++s) {
      if (f.var[s] < 0) continue;
      g[f.var[s]] += f.power * f.coef[s] * inv;
      for (int t = 0; t < 2; ++t) {
        if (f.var[t] < 0) continue;
        h[f.var[s] * dim + f.var[t]] -= f.power * f.coef[s] * f.coef[t] * inv * inv;
      }
    }
  }
  for (std::size_t v = 0; v < dim; ++v) {
    jet.grad[v] = jet.value * g[v];
    for (std::size_t w = 0; w < dim; ++w) jet.hessian[v * dim + w] = jet.value * (h[v * dim + w] + g[v] * g[w]);
  }
  return jet;
}

ChargeNode charge_of(const VertexNode& v) { return ChargeNode::rooted_vertex(v.sigma, v.sigma_star); }

CorrelationQuery engine_query(const StarProduct& sp) {
  CorrelationQuery q;
  Numerology n = Numerology::from_kappa(sp.kappa);
  q.background = sp.insertion ? Background::insertion(n.a, n.b) : Background::bmod(n.b);
  for (const auto& v : sp.nodes) q.entries.push_back({FieldExpr::charge(charge_of(v)), v.point});
  return q;
}

ResidualResult cardy_residual(const StarProduct& sp) {
  require(sp.insertion, ErrorKind::InvalidArgument, "Cardy's equation needs the boundary insertion");
  Numerology num = Numerology::from_kappa(sp.kappa);
  StarJet jet = star_jet(sp);
  const std::size_t dim = jet.grad.size();
  cplx second = 0.0;
  for (std::size_t v = 0; v < dim; ++v)
    for (std::size_t w = 0; w < dim; ++w) second += jet.hessian[v * dim + w];
  cplx lhs = second / (2.0 * num.a * num.a);
  cplx rhs = 0.0;
  for (std::size_t j = 0; j < sp.nodes.size(); ++j) {
    const auto& v = sp.nodes[j];
    VertexDims d = vertex_dims(v.sigma, v.sigma_star, num.b);
    cplx z = v.point.value(), zb = std::conj(z);
    rhs += -jet.grad[2 * j] / z + d.lambda * jet.value / (z * z);
    rhs += -jet.grad[2 * j + 1] / zb + d.lambda_star * jet.value / (zb * zb);
  }
  return {lhs, rhs, normalized_residual(lhs, rhs)};
}

ResidualResult kz_residual(const std::vector<VertexNode>& nodes, std::size_t j) {
  require(j < nodes.size(), ErrorKind::InvalidArgument, "KZ index out of range");
  StarProduct sp;
  for (const auto& v : nodes) sp.nodes.push_back({v.sigma, -v.sigma, v.point});
  StarJet jet = star_jet(sp);
  cplx zj = nodes[j].point.value();
  double sj = nodes[j].sigma;
  cplx bracket = -sj * sj / (zj - std::conj(zj));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k == j) continue;
    cplx zk = nodes[k].point.value();
    bracket += sj * nodes[k].sigma * (1.0 / (zj - zk) - 1.0 / (zj - std::conj(zk)));
  }
  cplx lhs = jet.grad[2 * j];
  cplx rhs = bracket * jet.value;
  return {lhs, rhs, normalized_residual(lhs, rhs)};
}

ResidualResult ward_residual(const std::vector<WardEntry>& string, const Background& background, cplx zeta) {
  CorrelationQuery base;
  base.background = background;
  for (const auto& e : string) {
    require(std::abs(e.point.value() - zeta) >= 1e-2, ErrorKind::InvalidArgument, "probe point too close to a node");
    base.entries.push_back({e.field, e.point});
  }
  CorrelationQuery with_t = base;
  with_t.entries.insert(with_t.entries.begin(), Entry{virasoro_field(background.b()), HalfPlanePoint::interior(zeta)});
  cplx lhs = correlate(with_t);
  cplx ex = correlate(base);
  cplx rhs = 0.0;
  for (std::size_t j = 0; j < string.size(); ++j) {
    cplx z = string[j].point.value(), zb = std::conj(z);
    CorrelationQuery d = base, db = base;
    d.entries[j].field = field_derivative(string[j].field, true);
    db.entries[j].field = field_derivative(string[j].field, false);
    rhs += correlate(d) / (zeta - z) + string[j].lambda * ex / ((zeta - z) * (zeta - z));
    rhs += correlate(db) / (zeta - zb) + string[j].lambda_star * ex / ((zeta - zb) * (zeta - zb));
  }
  return {lhs, rhs, normalized_residual(lhs, rhs)};
}

StarProduct parse_star_product(const nlohmann::json& j) {
  require(j.is_object() && j.contains("nodes") && j.at("nodes").is_array(), ErrorKind::InvalidArgument,
          "star product: expected an object with a nodes array");
  StarProduct sp;
  sp.insertion = j.value("insertion", false);
  sp.kappa = j.value("kappa", 4.0);
  for (const auto& n : j.at("nodes")) {
    require(n.contains("sigma"), ErrorKind::InvalidArgument, "star product node: missing sigma");
    sp.nodes.push_back({n.at("sigma").get<double>(), n.value("sigmaStar", 0.0), parse_point(n)});
  }
  return sp;
}

}  // namespace cftlab
