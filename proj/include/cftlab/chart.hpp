#pragma once

#include <array>
#include <memory>
#include <variant>
#include <vector>

#include "cftlab/halfplane.hpp"

namespace cftlab {

struct ChartJet {
  cplx value, d1, d2, d3;
};

// An analytic transition map: Moebius, truncated power series, or a composite
// g∘h of two such maps.
class ChartMap {
 public:
  // (a z + b)/(c z + d); the coefficients need not be normalized.
  static ChartMap moebius(cplx a, cplx b, cplx c, cplx d);
  // sum_k coeffs[k] (z - center)^k; degree >= 5 for test maps.
  static ChartMap power_series(cplx center, std::vector<cplx> coeffs);
  static ChartMap affine(cplx scale, cplx shift);
  // outer∘inner
  static ChartMap compose(const ChartMap& outer, const ChartMap& inner);

  ChartJet jet(cplx z) const;
  bool is_moebius() const;

 private:
  struct Moebius {
    cplx a, b, c, d;
  };
  struct Series {
    cplx center;
    std::vector<cplx> coeffs;
  };
  struct Composite {
    std::shared_ptr<const ChartMap> outer, inner;
  };
  std::variant<Moebius, Series, Composite> rep_;

  explicit ChartMap(std::variant<Moebius, Series, Composite> r) : rep_(std::move(r)) {}
};

struct SchwarzianPair {
  cplx pre;  // N_h = h''/h'
  cplx schwarzian;  // S_h = N_h' - N_h^2/2
};

SchwarzianPair schwarzian(const ChartMap& h, cplx z);

enum class LawKind { Differential, PreSchwarzian, Schwarzian, PrePreSchwarzian };

// A transformation law. Differential uses (lambda, lambdaStar); the form laws
// use mu for the holomorphic part and muStar for the antiholomorphic part.
struct TransformLaw {
  LawKind kind = LawKind::Differential;
  cplx lambda = 0.0, lambda_star = 0.0;
  cplx mu = 0.0, mu_star = 0.0;

  static TransformLaw differential(cplx l, cplx ls) { return {LawKind::Differential, l, ls, 0.0, 0.0}; }
  static TransformLaw pre_schwarzian(cplx m) { return {LawKind::PreSchwarzian, 0.0, 0.0, m, 0.0}; }
  static TransformLaw schwarzian(cplx m) { return {LawKind::Schwarzian, 0.0, 0.0, m, 0.0}; }
  static TransformLaw pre_pre_schwarzian(cplx m, cplx ms = 0.0) {
    return {LawKind::PrePreSchwarzian, 0.0, 0.0, m, ms};
  }
};

// Value in the source chart at z from the value of the field at h(z) in the target chart.
cplx transform_value(const TransformLaw& law, const ChartMap& h, cplx value_at_hz, cplx z);

}  // namespace cftlab
