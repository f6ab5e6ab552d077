#include "cftlab/wick_json.hpp"

#include <string>

#include "cftlab/error.hpp"

namespace cftlab {

using nlohmann::json;

cplx json_complex(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorKind::InvalidArgument, std::string(what) + ": expected a number or [re, im]");
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

namespace {

cplx optional_complex(const json& j, const char* key, cplx fallback) {
  return j.contains(key) ? json_complex(j.at(key), key) : fallback;
}

double optional_real(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number(), ErrorKind::InvalidArgument, std::string(key) + ": expected a number");
  return j.at(key).get<double>();
}

std::vector<BasicField> parse_factors(const json& node) {
  std::vector<BasicField> out;
  if (!node.contains("factors")) return out;
  const json& fs = node.at("factors");
  require(fs.is_array(), ErrorKind::InvalidArgument, "factors: expected an array");
  for (const auto& f : fs) {
    require(f.is_array() && f.size() == 2 && f[0].is_number_integer() && f[1].is_number_integer(),
            ErrorKind::InvalidArgument, "factors: each factor is [dOrder, dbarOrder]");
    int d = f[0].get<int>(), db = f[1].get<int>();
    require(d >= 0 && db >= 0, ErrorKind::InvalidArgument, "factors: orders must be nonnegative");
    out.push_back({d, db});
  }
  return out;
}

}  // namespace

HalfPlanePoint parse_point(const json& node) {
  require(node.contains("point"), ErrorKind::InvalidArgument, "node: missing point");
  cplx z = json_complex(node.at("point"), "point");
  if (node.value("boundary", false)) {
    require(z.imag() == 0.0, ErrorKind::InvalidArgument, "point: boundary point needs Im = 0");
    return HalfPlanePoint::boundary(z.real());
  }
  return HalfPlanePoint::interior(z);
}

FieldExpr parse_node(const json& node, double b) {
  require(node.is_object(), ErrorKind::InvalidArgument, "node: expected an object");
  std::string kind = node.value("kind", std::string("monomial"));
  cplx coef = optional_complex(node, "coef", 1.0);
  if (kind == "monomial") {
    WickMonomial m{parse_factors(node), coef};
    return FieldExpr::monomial(m);
  }
  if (kind == "virasoro") return coef * virasoro_field(optional_real(node, "b", b));
  if (kind == "charge") {
    ChargeNode c;
    c.rooted = node.value("rooted", false);
    if (c.rooted) {
      c.mu = optional_complex(node, "mu", 0.0);
      c.mu_star = optional_complex(node, "muStar", 0.0);
    } else {
      cplx alpha = node.contains("alpha") ? json_complex(node.at("alpha"), "alpha")
                                          : optional_complex(node, "mu", 0.0);
      if (node.contains("muStar"))
        require(json_complex(node.at("muStar"), "muStar") == alpha, ErrorKind::InvalidArgument,
                "charge: non-chiral nodes need mu == muStar");
      c.mu = c.mu_star = alpha;
      c.normalized = node.value("normalized", false);
    }
    FieldTerm t;
    t.coef = coef;
    t.factors = parse_factors(node);
    t.charge = c;
    FieldExpr out{{t}};
    out.simplify();
    return out;
  }
  fail(ErrorKind::UnknownName, "node: unknown kind '" + kind + "'");
}

Background parse_background(const json& j) {
  if (j.is_null()) return Background::none();
  require(j.is_object(), ErrorKind::InvalidArgument, "background: expected an object");
  std::string type = j.value("type", std::string("none"));
  double b = optional_real(j, "b", 0.0);
  if (type == "none") return Background::none();
  if (type == "bmod") return Background::bmod(b);
  if (type == "insertion") {
    require(j.contains("a"), ErrorKind::InvalidArgument, "background: insertion needs a");
    return Background::insertion(optional_real(j, "a", 0.0), b);
  }
  if (type == "pointInsertion") {
    require(j.contains("alpha") && j.contains("z0"), ErrorKind::InvalidArgument,
            "background: pointInsertion needs alpha and z0");
    return Background::point_insertion(json_complex(j.at("alpha"), "alpha"), json_complex(j.at("z0"), "z0"), b);
  }
  fail(ErrorKind::UnknownName, "background: unknown type '" + type + "'");
}

CorrelationQuery parse_query(const json& doc) {
  require(doc.is_object() && doc.contains("nodes") && doc.at("nodes").is_array(), ErrorKind::InvalidArgument,
          "query: expected an object with a nodes array");
  CorrelationQuery q;
  q.background = parse_background(doc.value("background", json()));
  for (const auto& n : doc.at("nodes")) q.entries.push_back({parse_node(n, q.background.b()), parse_point(n)});
  return q;
}

}  // namespace cftlab
