#include <cstdint>
#include <map>
#include <tuple>

#include "cftlab/error.hpp"
#include "cftlab/wick.hpp"

namespace cftlab {

namespace {

constexpr int kCachedOrder = 10;

const KernelSum& mixed_kernel(int a, int b, int c, int d) {
  thread_local std::map<std::tuple<int, int, int, int>, KernelSum> cache;
  auto key = std::make_tuple(a, b, c, d);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, green_mixed_partial(a, b, c, d)).first;
  return it->second;
}

// Contractions of d^j dbar^k Phi(zeta) with the chiral halves rooted at infinity.
// hol: log(z - zetabar) - log(z - zeta); anti: log(zbar - zeta) - log(zbar - zetabar)
const std::pair<KernelSum, KernelSum>& rooted_kernels(int d, int dbar) {
  thread_local std::map<std::pair<int, int>, std::pair<KernelSum, KernelSum>> cache;
  auto key = std::make_pair(d, dbar);
  auto it = cache.find(key);
  if (it == cache.end()) {
    KernelSum hol, anti;
    hol.logs = {{1.0, Var::Z, Var::ZetaBar}, {-1.0, Var::Z, Var::Zeta}};
    anti.logs = {{1.0, Var::ZBar, Var::Zeta}, {-1.0, Var::ZBar, Var::ZetaBar}};
    hol = hol.derivative(Var::Zeta, d).derivative(Var::ZetaBar, dbar);
    anti = anti.derivative(Var::Zeta, d).derivative(Var::ZetaBar, dbar);
    it = cache.emplace(key, std::make_pair(std::move(hol), std::move(anti))).first;
  }
  return it->second;
}

void require_distinct(const HalfPlanePoint& a, const HalfPlanePoint& b) {
  require(a.value() != b.value(), ErrorKind::CoincidentPoints, "coincident points in query");
}

}  // namespace

// ---------------------------------------------------------------- background

Background Background::none() { return Background{}; }

Background Background::bmod(double b) {
  Background g;
  g.type_ = Type::BMod;
  g.b_ = b;
  return g;
}

Background Background::insertion(double a, double b) {
  Background g;
  g.type_ = Type::Insertion;
  g.a_ = a;
  g.b_ = b;
  g.hol_.logs = {{cplx(0.0, -a), Var::Zeta, Var::Z}};
  g.anti_.logs = {{cplx(0.0, a), Var::ZetaBar, Var::ZBar}};
  g.prepare();
  return g;
}

Background Background::point_insertion(cplx alpha, cplx z0, double b) {
  require(z0.imag() >= 0.0, ErrorKind::InvalidArgument, "insertion point must lie in the closed half-plane");
  Background g;
  g.type_ = Type::PointInsertion;
  g.alpha_ = alpha;
  g.z0_ = z0;
  g.b_ = b;
  g.hol_.logs = {{alpha, Var::Zeta, Var::ZBar}, {-alpha, Var::Zeta, Var::Z}};
  g.anti_.logs = {{alpha, Var::ZetaBar, Var::Z}, {-alpha, Var::ZetaBar, Var::ZBar}};
  g.prepare();
  return g;
}

void Background::prepare() {
  hol_d_ = {hol_};
  anti_d_ = {anti_};
  for (int k = 1; k <= kCachedOrder; ++k) {
    hol_d_.push_back(hol_d_.back().derivative(Var::Zeta));
    anti_d_.push_back(anti_d_.back().derivative(Var::ZetaBar));
  }
}

cplx Background::hol_mean(const HalfPlanePoint& z) const {
  if (is_zero()) return 0.0;
  return hol_.evaluate(z.value(), z0_);
}

cplx Background::anti_mean(const HalfPlanePoint& z) const {
  if (is_zero()) return 0.0;
  return anti_.evaluate(z.value(), z0_);
}

cplx Background::mean(BasicField f, const HalfPlanePoint& z) const {
  if (is_zero()) return 0.0;
  if (f.d > 0 && f.dbar > 0) return 0.0;
  if (f.d > 0) {
    if (f.d <= kCachedOrder) return hol_d_[f.d].evaluate(z.value(), z0_);
    return hol_.derivative(Var::Zeta, f.d).evaluate(z.value(), z0_);
  }
  if (f.dbar > 0) {
    if (f.dbar <= kCachedOrder) return anti_d_[f.dbar].evaluate(z.value(), z0_);
    return anti_.derivative(Var::ZetaBar, f.dbar).evaluate(z.value(), z0_);
  }
  return hol_mean(z) + anti_mean(z);
}

Background Background::conjugated() const {
  if (type_ == Type::PointInsertion) return point_insertion(std::conj(alpha_), z0_, b_);
  return *this;
}

// ---------------------------------------------------------------- pairings

cplx pair_basic(BasicField f1, const HalfPlanePoint& zeta, BasicField f2, const HalfPlanePoint& z) {
  require_distinct(zeta, z);
  if (f1 == BasicField{} && f2 == BasicField{}) return 2.0 * green(zeta, z);
  return mixed_kernel(f1.d, f1.dbar, f2.d, f2.dbar).evaluate(zeta.value(), z.value());
}

cplx pair_charge(BasicField f, const HalfPlanePoint& zeta, const ChargeNode& c, const HalfPlanePoint& z) {
  require_distinct(zeta, z);
  if (!c.rooted) return c.mu * pair_basic(f, zeta, BasicField{}, z);
  const auto& [hol, anti] = rooted_kernels(f.d, f.dbar);
  cplx out = 0.0;
  if (c.mu != cplx(0.0)) out += c.mu * hol.evaluate(zeta.value(), z.value());
  if (c.mu_star != cplx(0.0)) out += c.mu_star * anti.evaluate(zeta.value(), z.value());
  return out;
}

cplx charge_prefactor(const std::vector<PlacedCharge>& nodes, const Background& background) {
  cplx exponent = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const auto& [cj, pj] = nodes[j];
    cplx zj = pj.value();
    cplx p = cj.self_exponent();
    if (p != cplx(0.0)) {
      require(!pj.on_boundary(), ErrorKind::InvalidArgument, "normalized charge needs an interior point");
      exponent += cj.rooted ? p * std::log(zj - std::conj(zj)) : p * std::log(2.0 * pj.y());
    }
    if (!background.is_zero()) {
      if (cj.rooted)
        exponent += cj.mu * background.hol_mean(pj) + cj.mu_star * background.anti_mean(pj);
      else
        exponent += cj.mu * (background.hol_mean(pj) + background.anti_mean(pj));
    }
    for (std::size_t k = j + 1; k < nodes.size(); ++k) {
      const auto& [ck, pk] = nodes[k];
      require_distinct(pj, pk);
      cplx zk = pk.value();
      if (!cj.rooted && !ck.rooted) {
        exponent += cj.mu * ck.mu * (2.0 * green(pj, pk));
      } else if (cj.rooted && ck.rooted) {
        exponent += -cj.mu * ck.mu * std::log(zj - zk);
        exponent += cj.mu * ck.mu_star * std::log(zj - std::conj(zk));
        exponent += cj.mu_star * ck.mu * std::log(std::conj(zj) - zk);
        exponent += -cj.mu_star * ck.mu_star * std::log(std::conj(zj) - std::conj(zk));
      } else if (!cj.rooted) {
        exponent += cj.mu * pair_charge(BasicField{}, pj, ck, pk);
      } else {
        exponent += ck.mu * pair_charge(BasicField{}, pk, cj, pj);
      }
    }
  }
  return std::exp(exponent);
}

// ---------------------------------------------------------------- expansion

std::vector<ProductTerm> expand_terms(const CorrelationQuery& query) {
  const auto& entries = query.entries;
  for (std::size_t j = 0; j < entries.size(); ++j)
    for (std::size_t k = j + 1; k < entries.size(); ++k) require_distinct(entries[j].point, entries[k].point);
  if (query.background.type() == Background::Type::PointInsertion)
    for (const auto& e : entries)
      require(e.point.value() != query.background.source(), ErrorKind::CoincidentPoints,
              "query point coincides with the inserted charge");

  std::vector<ProductTerm> out;
  std::vector<std::size_t> choice(entries.size(), 0);
  for (const auto& e : entries)
    if (e.field.terms.empty()) return out;

  // lexicographic over term choices, first entry most significant
  while (true) {
    ProductTerm pt;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const FieldTerm& t = entries[e].field.terms[choice[e]];
      const HalfPlanePoint& p = entries[e].point;
      pt.weight *= t.coef;
      if (t.inv_zzbar != 0) {
        require(!p.on_boundary(), ErrorKind::InvalidArgument, "(z - zbar) power at a boundary point");
        cplx inv = 1.0 / (p.value() - std::conj(p.value()));
        for (int k = 0; k < t.inv_zzbar; ++k) pt.weight *= inv;
      }
      for (auto f : t.factors) pt.occurrences.push_back({f, e, p});
      if (t.charge) {
        pt.charges.push_back({*t.charge, p});
        pt.charge_entries.push_back(e);
      }
    }
    out.push_back(std::move(pt));
    std::size_t e = entries.size();
    while (e > 0) {
      --e;
      if (++choice[e] < entries[e].field.terms.size()) break;
      choice[e] = 0;
      if (e == 0) return out;
    }
    if (entries.empty()) return out;
  }
}

cplx single_value(const ProductTerm& term, std::size_t i, const Background& background) {
  const Occurrence& o = term.occurrences[i];
  cplx h = background.mean(o.field, o.point);
  for (std::size_t c = 0; c < term.charges.size(); ++c) {
    if (term.charge_entries[c] == o.entry) continue;
    h += pair_charge(o.field, o.point, term.charges[c].node, term.charges[c].point);
  }
  return h;
}

namespace {

struct TermTables {
  std::size_t n = 0;
  std::vector<cplx> single;
  std::vector<cplx> pair;  // n*n, only i<j with distinct entries filled
  std::vector<bool> pairable;
};

TermTables tabulate(const ProductTerm& term, const Background& background) {
  TermTables t;
  t.n = term.occurrences.size();
  t.single.resize(t.n);
  t.pair.assign(t.n * t.n, 0.0);
  t.pairable.assign(t.n * t.n, false);
  for (std::size_t i = 0; i < t.n; ++i) {
    t.single[i] = single_value(term, i, background);
    for (std::size_t j = i + 1; j < t.n; ++j) {
      const auto& a = term.occurrences[i];
      const auto& b = term.occurrences[j];
      if (a.entry == b.entry) continue;
      t.pairable[i * t.n + j] = true;
      t.pair[i * t.n + j] = pair_basic(a.field, a.point, b.field, b.point);
    }
  }
  return t;
}

struct DiagramSum {
  const TermTables& t;
  cplx sum = 0.0;

  void run(std::size_t i, std::uint64_t used, cplx prod) {
    while (i < t.n && ((used >> i) & 1u)) ++i;
    if (i == t.n) {
      sum += prod;
      return;
    }
    used |= std::uint64_t{1} << i;
    if (t.single[i] != cplx(0.0)) run(i + 1, used, prod * t.single[i]);
    for (std::size_t j = i + 1; j < t.n; ++j) {
      if ((used >> j) & 1u) continue;
      if (!t.pairable[i * t.n + j]) continue;
      cplx v = t.pair[i * t.n + j];
      if (v == cplx(0.0)) continue;
      run(i + 1, used | (std::uint64_t{1} << j), prod * v);
    }
  }
};

void check_cap(const ProductTerm& term, const EngineOptions& options) {
  require(term.occurrences.size() <= options.field_cap && term.occurrences.size() <= 64,
          ErrorKind::CapExceeded, "basic-field count exceeds the configured cap");
}

}  // namespace

cplx correlate(const CorrelationQuery& query, const EngineOptions& options) {
  auto terms = expand_terms(query);
  for (const auto& term : terms) check_cap(term, options);
  cplx total = 0.0;
  for (const auto& term : terms) {
    if (term.weight == cplx(0.0)) continue;
    cplx prefactor = charge_prefactor(term.charges, query.background);
    TermTables tables = tabulate(term, query.background);
    DiagramSum ds{tables};
    ds.run(0, 0, 1.0);
    total += (term.weight * prefactor) * ds.sum;
  }
  return total;
}

std::vector<Diagram> enumerate_diagrams(const CorrelationQuery& query, const EngineOptions& options) {
  auto terms = expand_terms(query);
  for (const auto& term : terms) check_cap(term, options);
  std::vector<Diagram> out;
  for (std::size_t ti = 0; ti < terms.size(); ++ti) {
    const auto& term = terms[ti];
    const std::size_t n = term.occurrences.size();
    std::vector<cplx> single(n);
    for (std::size_t i = 0; i < n; ++i) single[i] = single_value(term, i, query.background);
    std::vector<std::size_t> partner(n, n);
    auto rec = [&](auto&& self, std::size_t i) -> void {
      while (i < n && partner[i] != n) ++i;
      if (i == n) {
        Diagram d{ti, partner, false};
        for (std::size_t k = 0; k < n; ++k)
          if (partner[k] == k && single[k] == cplx(0.0)) d.annihilated = true;
        out.push_back(std::move(d));
        return;
      }
      partner[i] = i;
      self(self, i + 1);
      for (std::size_t j = i + 1; j < n; ++j) {
        if (partner[j] != n || term.occurrences[i].entry == term.occurrences[j].entry) continue;
        partner[i] = j;
        partner[j] = i;
        self(self, i + 1);
        partner[j] = n;
      }
      partner[i] = n;
    };
    rec(rec, 0);
  }
  return out;
}

CorrelationQuery conjugate(const CorrelationQuery& q) {
  CorrelationQuery out;
  out.background = q.background.conjugated();
  for (const auto& e : q.entries) {
    Entry c{FieldExpr{}, e.point};
    for (const auto& t : e.field.terms) {
      FieldTerm u = t;
      u.coef = std::conj(t.coef);
      if (t.inv_zzbar % 2 != 0) u.coef = -u.coef;
      for (auto& f : u.factors) f = conjugate(f);
      if (t.charge) {
        u.charge->mu = std::conj(t.charge->mu_star);
        u.charge->mu_star = std::conj(t.charge->mu);
      }
      c.field.terms.push_back(u);
    }
    c.field.simplify();
    out.entries.push_back(std::move(c));
  }
  return out;
}

}  // namespace cftlab
