#include "cftlab/ope.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "cftlab/error.hpp"
#include "cftlab/numerology.hpp"

namespace cftlab {

namespace {

cplx unit_root(int k, int m) {
  double t = 2.0 * std::numbers::pi * k / m;
  return {std::cos(t), std::sin(t)};
}

cplx ipow(cplx x, int p) {
  cplx r = 1.0;
  if (p >= 0) {
    for (int k = 0; k < p; ++k) r *= x;
  } else {
    cplx inv = 1.0 / x;
    for (int k = 0; k < -p; ++k) r *= inv;
  }
  return r;
}

bool same_field(const FieldExpr& a, const FieldExpr& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    const auto& x = a.terms[i];
    const auto& y = b.terms[i];
    if (x.coef != y.coef || x.inv_zzbar != y.inv_zzbar || x.factors != y.factors || x.charge != y.charge)
      return false;
  }
  return true;
}

// probe with x at the front and y second, ready for repeated evaluation
CorrelationQuery with_front(const CorrelationQuery& probe, std::vector<Entry> front) {
  CorrelationQuery q;
  q.background = probe.background;
  q.entries = std::move(front);
  q.entries.insert(q.entries.end(), probe.entries.begin(), probe.entries.end());
  return q;
}

void require_holomorphic(const FieldExpr& x) {
  require(x.holomorphic(), ErrorKind::InvalidArgument, "contour field must be holomorphic");
}

void check_radii(cplx z, const std::vector<double>& radii, const std::vector<cplx>& obstacles) {
  for (std::size_t k = 0; k < radii.size(); ++k) {
    validate_window({z, radii[k], 2, 0, 0}, obstacles);
    if (k > 0)
      require(radii[k] < radii[k - 1], ErrorKind::WindowViolation, "nested radii must decrease inward");
  }
}

}  // namespace

void validate_window(const LaurentWindow& w, const std::vector<cplx>& obstacles) {
  require(w.samples >= 2 && std::has_single_bit(static_cast<unsigned>(w.samples)), ErrorKind::WindowViolation,
          "sample count must be a power of two");
  require(w.n_max >= w.n_min && w.n_max - w.n_min + 1 <= w.samples / 2, ErrorKind::WindowViolation,
          "coefficient range exceeds half the sample count");
  require(w.radius > 0.0 && w.radius < w.center.imag(), ErrorKind::WindowViolation,
          "contour leaves the upper half-plane");
  for (cplx o : obstacles) {
    require(w.radius < std::abs(o - w.center), ErrorKind::WindowViolation, "contour encloses another node");
    require(w.radius < std::abs(std::conj(o) - w.center), ErrorKind::WindowViolation,
            "contour encloses a reflected node");
  }
}

std::map<int, cplx> laurent_extract(const std::function<cplx(cplx)>& f, const LaurentWindow& w,
                                    const std::vector<cplx>& obstacles) {
  validate_window(w, obstacles);
  std::vector<cplx> values(w.samples);
  for (int k = 0; k < w.samples; ++k) values[k] = f(w.center + w.radius * unit_root(k, w.samples));
  std::map<int, cplx> out;
  for (int n = w.n_min; n <= w.n_max; ++n) {
    cplx s = 0.0;
    // (zeta - z)^{-n} = r^{-n} e^{-2 pi i k n / M}
    for (int k = 0; k < w.samples; ++k) {
      int phase = static_cast<int>((static_cast<long long>(k) * n) % w.samples);
      s += values[k] * unit_root(-phase, w.samples);
    }
    out[n] = s * std::pow(w.radius, -n) / static_cast<double>(w.samples);
  }
  return out;
}

std::vector<cplx> obstacles_of(const CorrelationQuery& probe) {
  std::vector<cplx> out;
  for (const auto& e : probe.entries) out.push_back(e.point.value());
  if (probe.background.type() == Background::Type::Insertion) out.push_back(0.0);
  if (probe.background.type() == Background::Type::PointInsertion) out.push_back(probe.background.source());
  return out;
}

double admissible_radius(cplx z, const std::vector<cplx>& obstacles) {
  double r = z.imag();
  for (cplx o : obstacles) r = std::min({r, std::abs(o - z), std::abs(std::conj(o) - z)});
  return r;
}

std::map<int, cplx> ope_coefficients(const FieldExpr& x, const FieldExpr& y, const HalfPlanePoint& z,
                                     const CorrelationQuery& probe, int n_min, int n_max,
                                     const ContourOptions& opts) {
  require_holomorphic(x);
  auto obstacles = obstacles_of(probe);
  LaurentWindow w{z.value(), opts.radius_fraction * admissible_radius(z.value(), obstacles), opts.samples, n_min,
                  n_max};
  CorrelationQuery q = with_front(probe, {{x, z}, {y, z}});
  auto f = [&](cplx zeta) {
    q.entries[0].point = HalfPlanePoint::interior(zeta);
    return correlate(q);
  };
  return laurent_extract(f, w, obstacles);
}

cplx ope_coeff(const FieldExpr& x, int n, const FieldExpr& y, const HalfPlanePoint& z,
               const CorrelationQuery& probe, const ContourOptions& opts) {
  return ope_coefficients(x, y, z, probe, n, n, opts).at(n);
}

cplx virasoro_mode(int n, const FieldExpr& y, const HalfPlanePoint& z, const CorrelationQuery& probe,
                   const ContourOptions& opts) {
  return ope_coeff(virasoro_field(probe.background.b()), -n - 2, y, z, probe, opts);
}

Mode virasoro_mode_op(int n, double b) { return {virasoro_field(b), n + 1}; }
Mode current_mode_op(int n) { return {current_field(), n}; }

cplx apply_modes(const std::vector<Mode>& modes, const std::vector<double>& radii, const FieldExpr& y,
                 const HalfPlanePoint& z, const CorrelationQuery& probe, int samples) {
  require(modes.size() == radii.size(), ErrorKind::InvalidArgument, "one radius per mode");
  require(samples >= 2 && std::has_single_bit(static_cast<unsigned>(samples)), ErrorKind::WindowViolation,
          "sample count must be a power of two");
  for (const auto& m : modes) require_holomorphic(m.field);
  check_radii(z.value(), radii, obstacles_of(probe));
  std::vector<Entry> front;
  for (const auto& m : modes) front.push_back({m.field, z});
  front.push_back({y, z});
  CorrelationQuery q = with_front(probe, std::move(front));
  const std::size_t depth = modes.size();
  cplx total = 0.0;
  auto rec = [&](auto&& self, std::size_t level, cplx weight) -> void {
    if (level == depth) {
      total += weight * correlate(q);
      return;
    }
    for (int k = 0; k < samples; ++k) {
      cplx offset = radii[level] * unit_root(k, samples);
      q.entries[level].point = HalfPlanePoint::interior(z.value() + offset);
      self(self, level + 1, weight * ipow(offset, modes[level].power + 1) / static_cast<double>(samples));
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

cplx nested_commutator(const Mode& a, const Mode& b, const FieldExpr& y, const HalfPlanePoint& z,
                       const CorrelationQuery& probe, int samples, double r_inner, double r_outer) {
  if (!same_field(a.field, b.field))
    return apply_modes({a, b}, {r_outer, r_inner}, y, z, probe, samples) -
           apply_modes({b, a}, {r_outer, r_inner}, y, z, probe, samples);
  require_holomorphic(a.field);
  check_radii(z.value(), {r_outer, r_inner}, obstacles_of(probe));
  CorrelationQuery q = with_front(probe, {{a.field, z}, {a.field, z}, {y, z}});
  cplx total = 0.0;
  const double norm = 1.0 / (static_cast<double>(samples) * samples);
  for (int k2 = 0; k2 < samples; ++k2) {
    cplx u2 = r_outer * unit_root(k2, samples);
    q.entries[0].point = HalfPlanePoint::interior(z.value() + u2);
    for (int k1 = 0; k1 < samples; ++k1) {
      cplx u1 = r_inner * unit_root(k1, samples);
      q.entries[1].point = HalfPlanePoint::interior(z.value() + u1);
      cplx w = ipow(u2, a.power + 1) * ipow(u1, b.power + 1) - ipow(u2, b.power + 1) * ipow(u1, a.power + 1);
      if (w == cplx(0.0)) continue;
      total += w * correlate(q);
    }
  }
  return total * norm;
}

double normalized_residual(cplx lhs, cplx rhs) {
  return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

CommutatorResult commutator_residual(ModeAlgebra algebra, int m, int n, const FieldExpr& y,
                                     const HalfPlanePoint& z, const CorrelationQuery& probe, int samples) {
  const double b = probe.background.b();
  double base = admissible_radius(z.value(), obstacles_of(probe));
  Mode am = algebra == ModeAlgebra::Virasoro ? virasoro_mode_op(m, b) : current_mode_op(m);
  Mode an = algebra == ModeAlgebra::Virasoro ? virasoro_mode_op(n, b) : current_mode_op(n);
  cplx comm = nested_commutator(am, an, y, z, probe, samples, 0.15 * base, 0.35 * base);

  CorrelationQuery plain = with_front(probe, {{y, z}});
  cplx expected = 0.0;
  if (algebra == ModeAlgebra::Virasoro) {
    if (m != n) expected += static_cast<double>(m - n) * virasoro_mode(m + n, y, z, probe);
    if (m + n == 0) {
      double c = 1.0 - 12.0 * b * b;
      expected += (c / 12.0) * m * (m * m - 1.0) * correlate(plain);
    }
  } else if (m + n == 0) {
    expected = static_cast<double>(n) * correlate(plain);
  }
  return {comm, expected, normalized_residual(comm, expected)};
}

double central_charge_measure(double b, int samples) {
  CorrelationQuery probe;
  probe.background = Background::bmod(b);
  FieldExpr t = virasoro_field(b);
  ContourOptions opts{samples, 0.5};
  return 2.0 * ope_coeff(t, -4, t, HalfPlanePoint::interior({0.0, 1.0}), probe, opts).real();
}

namespace {

CorrelationQuery with_b(const CorrelationQuery& probe, double b) {
  CorrelationQuery q = probe;
  if (q.background.is_zero()) q.background = Background::bmod(b);
  return q;
}

}  // namespace

DegeneracyResult degeneracy_residual(double kappa, const HalfPlanePoint& z, const CorrelationQuery& probe,
                                     double a_override) {
  Numerology num = Numerology::from_kappa(kappa);
  double a = a_override != 0.0 ? a_override : num.a;
  CorrelationQuery p = with_b(probe, num.b);
  FieldExpr v = FieldExpr::charge(ChargeNode::rooted_vertex(a, 0.0));
  cplx t0 = ope_coeff(virasoro_field(num.b), 0, v, z, p);
  CorrelationQuery q = with_front(p, {{field_derivative(field_derivative(v)), z}});
  cplx second = correlate(q) / (2.0 * a * a);
  return {t0, second, normalized_residual(t0, second)};
}

SingularVectorResult singular_vector_residual(double kappa, bool use_eta_prime, double sigma,
                                              const HalfPlanePoint& z, const CorrelationQuery& probe, bool nested) {
  Numerology num = Numerology::from_kappa(kappa);
  double eta = use_eta_prime ? num.eta_prime : num.eta;
  CorrelationQuery p = with_b(probe, num.b);
  FieldExpr v = FieldExpr::charge(ChargeNode::rooted_vertex(sigma, 0.0));
  cplx l2 = virasoro_mode(-2, v, z, p);
  cplx l11;
  if (nested) {
    double base = admissible_radius(z.value(), obstacles_of(p));
    Mode lm1 = virasoro_mode_op(-1, num.b);
    l11 = apply_modes({lm1, lm1}, {0.35 * base, 0.15 * base}, v, z, p, 128);
  } else {
    l11 = correlate(with_front(p, {{field_derivative(field_derivative(v)), z}}));
  }
  cplx value = l2 + eta * l11;
  double scale = std::max({1.0, std::abs(l2), std::abs(eta * l11)});
  bool degenerate = sigma != 0.0 && std::abs(sigma + num.b - 1.0 / (2.0 * sigma)) < 1e-9 &&
                    std::abs(eta + 1.0 / (2.0 * sigma * sigma)) < 1e-9;
  return {value, std::abs(value) / scale, degenerate};
}

}  // namespace cftlab
