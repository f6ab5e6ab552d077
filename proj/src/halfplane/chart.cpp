#include "cftlab/chart.hpp"

#include <cmath>

#include "cftlab/error.hpp"

namespace cftlab {

ChartMap ChartMap::moebius(cplx a, cplx b, cplx c, cplx d) {
  require(a * d - b * c != cplx(0.0), ErrorKind::DegenerateMap, "moebius map with zero determinant");
  return ChartMap(Moebius{a, b, c, d});
}

ChartMap ChartMap::power_series(cplx center, std::vector<cplx> coeffs) {
  require(coeffs.size() >= 2, ErrorKind::InvalidArgument, "power series needs a linear term");
  return ChartMap(Series{center, std::move(coeffs)});
}

ChartMap ChartMap::affine(cplx scale, cplx shift) { return moebius(scale, shift, 0.0, 1.0); }

ChartMap ChartMap::compose(const ChartMap& outer, const ChartMap& inner) {
  return ChartMap(Composite{std::make_shared<const ChartMap>(outer), std::make_shared<const ChartMap>(inner)});
}

bool ChartMap::is_moebius() const {
  if (std::holds_alternative<Moebius>(rep_)) return true;
  if (auto* c = std::get_if<Composite>(&rep_)) return c->outer->is_moebius() && c->inner->is_moebius();
  return false;
}

ChartJet ChartMap::jet(cplx z) const {
  if (auto* m = std::get_if<Moebius>(&rep_)) {
    cplx den = m->c * z + m->d;
    require(den != cplx(0.0), ErrorKind::DegenerateMap, "moebius map evaluated at its pole");
    cplx det = m->a * m->d - m->b * m->c;
    cplx inv = 1.0 / den;
    return {(m->a * z + m->b) * inv, det * inv * inv, -2.0 * m->c * det * inv * inv * inv,
            6.0 * m->c * m->c * det * inv * inv * inv * inv};
  }
  if (auto* s = std::get_if<Series>(&rep_)) {
    // Horner for the value and first three derivatives.
    cplx u = z - s->center;
    cplx p0 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;
    for (auto it = s->coeffs.rbegin(); it != s->coeffs.rend(); ++it) {
      p3 = p3 * u + p2;
      p2 = p2 * u + p1;
      p1 = p1 * u + p0;
      p0 = p0 * u + *it;
    }
    return {p0, p1, 2.0 * p2, 6.0 * p3};
  }
  const auto& c = std::get<Composite>(rep_);
  ChartJet h = c.inner->jet(z);
  ChartJet g = c.outer->jet(h.value);
  return {g.value, g.d1 * h.d1, g.d2 * h.d1 * h.d1 + g.d1 * h.d2,
          g.d3 * h.d1 * h.d1 * h.d1 + 3.0 * g.d2 * h.d1 * h.d2 + g.d1 * h.d3};
}

SchwarzianPair schwarzian(const ChartMap& h, cplx z) {
  ChartJet j = h.jet(z);
  require(j.d1 != cplx(0.0), ErrorKind::DegenerateMap, "map is not conformal at this point");
  cplx n = j.d2 / j.d1;
  if (h.is_moebius()) return {n, 0.0};
  return {n, j.d3 / j.d1 - 1.5 * n * n};
}

cplx transform_value(const TransformLaw& law, const ChartMap& h, cplx value_at_hz, cplx z) {
  ChartJet j = h.jet(z);
  require(j.d1 != cplx(0.0), ErrorKind::DegenerateMap, "map is not conformal at this point");
  switch (law.kind) {
    case LawKind::Differential: {
      cplx lg = std::log(j.d1);
      cplx factor = 1.0;
      if (law.lambda != cplx(0.0)) factor *= std::exp(law.lambda * lg);
      if (law.lambda_star != cplx(0.0)) factor *= std::exp(law.lambda_star * std::conj(lg));
      return factor * value_at_hz;
    }
    case LawKind::PreSchwarzian: {
      cplx n = j.d2 / j.d1;
      return j.d1 * value_at_hz + law.mu * n + law.mu_star * std::conj(n);
    }
    case LawKind::Schwarzian: {
      SchwarzianPair s = schwarzian(h, z);
      return j.d1 * j.d1 * value_at_hz + law.mu * s.schwarzian;
    }
    case LawKind::PrePreSchwarzian: {
      cplx lg = std::log(j.d1);
      return value_at_hz + law.mu * lg + law.mu_star * std::conj(lg);
    }
  }
  return value_at_hz;
}

}  // namespace cftlab
