#include <algorithm>
#include <map>
#include <tuple>

#include "cftlab/wick.hpp"

namespace cftlab {

void WickMonomial::canonicalize() { std::sort(factors.begin(), factors.end()); }

cplx ChargeNode::self_exponent() const {
  if (rooted) return mu * mu_star;
  if (normalized) return mu * mu;
  return 0.0;
}

FieldExpr FieldExpr::identity() { return FieldExpr{{FieldTerm{}}}; }

FieldExpr FieldExpr::monomial(const WickMonomial& m) {
  FieldTerm t;
  t.coef = m.coefficient;
  t.factors = m.factors;
  std::sort(t.factors.begin(), t.factors.end());
  return FieldExpr{{t}};
}

FieldExpr FieldExpr::basic(BasicField f, cplx coef) {
  FieldTerm t;
  t.coef = coef;
  t.factors = {f};
  return FieldExpr{{t}};
}

FieldExpr FieldExpr::charge(const ChargeNode& node) {
  FieldTerm t;
  t.charge = node;
  return FieldExpr{{t}};
}

FieldExpr& FieldExpr::operator+=(const FieldExpr& other) {
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  simplify();
  return *this;
}

FieldExpr& FieldExpr::operator*=(cplx s) {
  for (auto& t : terms) t.coef *= s;
  simplify();
  return *this;
}

FieldExpr operator+(FieldExpr a, const FieldExpr& b) { return a += b; }
FieldExpr operator*(cplx s, FieldExpr a) { return a *= s; }

bool FieldExpr::holomorphic() const {
  for (const auto& t : terms) {
    if (t.inv_zzbar != 0 || t.charge) return false;
    for (auto f : t.factors)
      if (f.dbar > 0 || f.d == 0) return false;
  }
  return true;
}

std::size_t FieldExpr::max_factor_count() const {
  std::size_t n = 0;
  for (const auto& t : terms) n = std::max(n, t.factors.size());
  return n;
}

namespace {

using ChargeKey = std::tuple<int, double, double, double, double, bool, bool>;

ChargeKey charge_key(const std::optional<ChargeNode>& c) {
  if (!c) return {0, 0, 0, 0, 0, false, false};
  return {1, c->mu.real(), c->mu.imag(), c->mu_star.real(), c->mu_star.imag(), c->rooted, c->normalized};
}

}  // namespace

void FieldExpr::simplify() {
  // merge like terms, keeping first-appearance order
  std::vector<FieldTerm> out;
  std::map<std::tuple<std::vector<BasicField>, int, ChargeKey>, std::size_t> index;
  for (auto t : terms) {
    std::sort(t.factors.begin(), t.factors.end());
    auto key = std::make_tuple(t.factors, t.inv_zzbar, charge_key(t.charge));
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.size());
      out.push_back(std::move(t));
    } else {
      out[it->second].coef += t.coef;
    }
  }
  std::erase_if(out, [](const FieldTerm& t) { return t.coef == cplx(0.0); });
  terms = std::move(out);
}

FieldExpr phi_field() { return FieldExpr::basic({0, 0}); }
FieldExpr current_field() { return FieldExpr::basic({1, 0}); }
FieldExpr current_bar_field() { return FieldExpr::basic({0, 1}); }

FieldExpr virasoro_field(double b) {
  FieldTerm jj;
  jj.coef = -0.5;
  jj.factors = {{1, 0}, {1, 0}};
  FieldTerm dj;
  dj.coef = cplx(0.0, b);
  dj.factors = {{2, 0}};
  FieldExpr t{{jj}};
  if (b != 0.0) t.terms.push_back(dj);
  return t;
}

FieldExpr field_derivative(const FieldExpr& x, bool holomorphic) {
  const double sign = holomorphic ? 1.0 : -1.0;
  FieldExpr out;
  for (const auto& t : x.terms) {
    // d (z - zbar)^{-k} = -k (z - zbar)^{-k-1}; dbar flips the sign
    if (t.inv_zzbar != 0) {
      FieldTerm u = t;
      u.coef *= -sign * t.inv_zzbar;
      u.inv_zzbar += 1;
      out.terms.push_back(u);
    }
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
      FieldTerm u = t;
      if (holomorphic)
        ++u.factors[i].d;
      else
        ++u.factors[i].dbar;
      out.terms.push_back(u);
    }
    if (t.charge) {
      cplx p = t.charge->self_exponent();
      if (p != cplx(0.0)) {
        FieldTerm u = t;
        u.coef *= sign * p;
        u.inv_zzbar += 1;
        out.terms.push_back(u);
      }
      FieldTerm u = t;
      u.coef *= holomorphic ? t.charge->mu : t.charge->mu_star;
      u.factors.push_back(holomorphic ? BasicField{1, 0} : BasicField{0, 1});
      out.terms.push_back(u);
    }
  }
  out.simplify();
  return out;
}

FieldExpr field_derivative(const WickMonomial& m, bool holomorphic) {
  return field_derivative(FieldExpr::monomial(m), holomorphic);
}

}  // namespace cftlab
