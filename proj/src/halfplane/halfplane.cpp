#include "cftlab/halfplane.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "cftlab/error.hpp"

namespace cftlab {

HalfPlanePoint HalfPlanePoint::interior(cplx z) {
  require(std::isfinite(z.real()) && std::isfinite(z.imag()), ErrorKind::InvalidArgument,
          "point is not finite");
  require(z.imag() > 0.0, ErrorKind::InvalidArgument, "interior point needs Im z > 0");
  return HalfPlanePoint(z, false);
}

HalfPlanePoint HalfPlanePoint::boundary(double x) {
  require(std::isfinite(x), ErrorKind::InvalidArgument, "boundary point is not finite");
  return HalfPlanePoint(cplx(x, 0.0), true);
}

bool is_barred(Var v) { return v == Var::ZetaBar || v == Var::ZBar; }

namespace {

cplx value_of(Var v, cplx zeta, cplx z) {
  switch (v) {
    case Var::Zeta: return zeta;
    case Var::ZetaBar: return std::conj(zeta);
    case Var::Z: return z;
    case Var::ZBar: return std::conj(z);
  }
  return {};
}

Var unbar(Var v) {
  if (v == Var::ZetaBar) return Var::Zeta;
  if (v == Var::ZBar) return Var::Z;
  if (v == Var::Zeta) return Var::ZetaBar;
  return Var::ZBar;
}

double delta(Var a, Var b) { return a == b ? 1.0 : 0.0; }

cplx ipow_inverse(cplx d, int n) {
  cplx inv = 1.0 / d;
  cplx r = 1.0;
  for (int k = 0; k < n; ++k) r *= inv;
  return r;
}

}  // namespace

KernelSum KernelSum::derivative(Var v) const {
  KernelSum out;
  for (const auto& t : terms) {
    double s = delta(t.a, v) - delta(t.b, v);
    if (s == 0.0) continue;
    out.terms.push_back({-static_cast<double>(t.power) * s * t.coef, t.a, t.b, t.power + 1});
  }
  for (const auto& l : logs) {
    double s = delta(l.a, v) - delta(l.b, v);
    if (s == 0.0) continue;
    out.terms.push_back({s * l.coef, l.a, l.b, 1});
  }
  out.normalize();
  return out;
}

KernelSum KernelSum::derivative(Var v, int times) const {
  KernelSum out = *this;
  for (int k = 0; k < times; ++k) out = out.derivative(v);
  return out;
}

cplx KernelSum::evaluate(cplx zeta, cplx z) const {
  cplx sum = 0.0;
  for (const auto& t : terms) {
    cplx d = value_of(t.a, zeta, z) - value_of(t.b, zeta, z);
    require(d != cplx(0.0), ErrorKind::CoincidentPoints, "kernel denominator vanishes");
    sum += t.coef * ipow_inverse(d, t.power);
  }
  for (const auto& l : logs) {
    // barred-first logs are conj(log) of the conjugate difference, formed
    // directly so that signed zeros on the real axis pick the same branch
    cplx d = is_barred(l.a) ? value_of(unbar(l.a), zeta, z) - value_of(unbar(l.b), zeta, z)
                            : value_of(l.a, zeta, z) - value_of(l.b, zeta, z);
    require(d != cplx(0.0), ErrorKind::CoincidentPoints, "kernel logarithm at zero");
    cplx lg = is_barred(l.a) ? std::conj(std::log(d)) : std::log(d);
    sum += l.coef * lg;
  }
  return sum;
}

KernelSum& KernelSum::operator+=(const KernelSum& other) {
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  logs.insert(logs.end(), other.logs.begin(), other.logs.end());
  normalize();
  return *this;
}

KernelSum& KernelSum::operator*=(cplx s) {
  for (auto& t : terms) t.coef *= s;
  for (auto& l : logs) l.coef *= s;
  normalize();
  return *this;
}

void KernelSum::normalize() {
  auto key = [](const RationalTerm& t) { return std::make_tuple(int(t.a), int(t.b), t.power); };
  std::sort(terms.begin(), terms.end(),
            [&](const RationalTerm& x, const RationalTerm& y) { return key(x) < key(y); });
  std::vector<RationalTerm> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && key(merged.back()) == key(t))
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const RationalTerm& t) { return t.coef == cplx(0.0); });
  terms = std::move(merged);

  auto lkey = [](const LogTerm& t) { return std::make_pair(int(t.a), int(t.b)); };
  std::sort(logs.begin(), logs.end(),
            [&](const LogTerm& x, const LogTerm& y) { return lkey(x) < lkey(y); });
  std::vector<LogTerm> lmerged;
  for (const auto& l : logs) {
    if (!lmerged.empty() && lkey(lmerged.back()) == lkey(l))
      lmerged.back().coef += l.coef;
    else
      lmerged.push_back(l);
  }
  std::erase_if(lmerged, [](const LogTerm& t) { return t.coef == cplx(0.0); });
  logs = std::move(lmerged);
}

KernelSum twice_green_kernel() {
  KernelSum k;
  k.logs = {{1.0, Var::Zeta, Var::ZBar},
            {1.0, Var::ZetaBar, Var::Z},
            {-1.0, Var::Zeta, Var::Z},
            {-1.0, Var::ZetaBar, Var::ZBar}};
  return k;
}

double green(const HalfPlanePoint& zeta, const HalfPlanePoint& z) {
  require(zeta.value() != z.value(), ErrorKind::CoincidentPoints, "green: coincident points");
  if (zeta.on_boundary() || z.on_boundary()) return 0.0;
  return std::log(std::abs(zeta.value() - std::conj(z.value()))) -
         std::log(std::abs(zeta.value() - z.value()));
}

KernelSum green_mixed_partial(int alpha, int beta, int gamma, int delta_) {
  require(alpha >= 0 && beta >= 0 && gamma >= 0 && delta_ >= 0, ErrorKind::InvalidArgument,
          "derivative orders must be nonnegative");
  return twice_green_kernel()
      .derivative(Var::Zeta, alpha)
      .derivative(Var::ZetaBar, beta)
      .derivative(Var::Z, gamma)
      .derivative(Var::ZBar, delta_);
}

ConformalRadiusData conformal_radius_data(const HalfPlanePoint& z) {
  require(!z.on_boundary(), ErrorKind::InvalidArgument, "conformal radius needs an interior point");
  double c = 2.0 * z.y();
  return {c, std::log(c), 1.0 / (z.value() - std::conj(z.value())), 0.0};
}

}  // namespace cftlab
