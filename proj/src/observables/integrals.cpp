#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "cftlab/error.hpp"
#include "cftlab/numerology.hpp"
#include "cftlab/observables.hpp"

namespace cftlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-12;

template <class F>
auto gk(const F& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, kTol);
}

// \int_0^1 f(s, 1 - s) ds for f ~ s^alpha at 0 and (1 - s)^beta at 1, with
// the substitutions s = v^{1/(1+alpha)} and 1 - s = v^{1/(1+beta)} on the
// halves. Exponents >= 1 are left alone: there the substituted integrand
// picks up a near-singular v^{2/(1+alpha)} term. f receives 1 - s separately
// so the far endpoint keeps full precision.
template <class F>
auto integrate_singular(const F& f, double alpha, double beta) {
  require(alpha > -1.0 && beta > -1.0, ErrorKind::Integrability, "quadrature: endpoint exponent <= -1");
  const double p = alpha < 1.0 ? 1.0 / (1.0 + alpha) : 1.0;
  const double q = beta < 1.0 ? 1.0 / (1.0 + beta) : 1.0;
  // The Jacobian v^{p-1} is s^{-alpha}. s is floored where v^p underflows;
  // f(s) s^{-alpha} is flat there.
  constexpr double floor = 1e-200;
  auto left = [&](double v) {
    const double s = std::max(std::pow(v, p), floor);
    return f(s, 1.0 - s) * (p * std::pow(s, p == 1.0 ? 0.0 : -alpha));
  };
  auto right = [&](double v) {
    const double sbar = std::max(std::pow(v, q), floor);
    return f(1.0 - sbar, sbar) * (q * std::pow(sbar, q == 1.0 ? 0.0 : -beta));
  };
  return gk(left, 0.0, std::pow(0.5, 1.0 / p)) + gk(right, 0.0, std::pow(0.5, 1.0 / q));
}

// x^p for real x approached from the upper half-plane
cplx boundary_pow(double x, double p) {
  if (x > 0.0) return std::pow(x, p);
  return std::pow(-x, p) * std::polar(1.0, kPi * p);
}

}  // namespace

double schramm_left_passage(double kappa, double theta) {
  require(kappa > 0.0 && kappa < 8.0, ErrorKind::InvalidArgument,
          "schramm_left_passage: kappa must lie in (0, 8)");
  require(theta >= 0.0 && theta <= kPi, ErrorKind::InvalidArgument, "schramm_left_passage: theta outside [0, pi]");
  const double m = 8.0 / kappa - 2.0;
  auto partial = [&](double t) {
    if (t == 0.0) return 0.0;
    return t * integrate_singular([&](double s, double) { return std::pow(std::sin(t * s), m); }, m, 0.0);
  };
  const double half = partial(kPi / 2);
  if (theta <= kPi / 2) return partial(theta) / (2.0 * half);
  return 1.0 - partial(kPi - theta) / (2.0 * half);
}

double cardy_boundary_hit(double kappa, double u) {
  require(kappa > 4.0 && kappa < 8.0, ErrorKind::InvalidArgument, "cardy_boundary_hit: kappa must lie in (4, 8)");
  require(u >= 0.0 && u <= 1.0, ErrorKind::InvalidArgument, "cardy_boundary_hit: u outside [0, 1]");
  const double p = 8.0 / kappa - 2.0, q = -4.0 / kappa;
  auto f = [&](double t, double tbar) { return std::pow(t, p) * std::pow(tbar, q); };
  const double total = integrate_singular(f, p, q);
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  if (u <= 0.5) return u * integrate_singular([&](double s, double) { return f(u * s, 1.0 - u * s); }, p, 0.0) / total;
  const double v = 1.0 - u;
  return 1.0 - v * integrate_singular([&](double s, double) { return f(1.0 - v * s, v * s); }, q, 0.0) / total;
}

cplx cardy_triangle_integral(double kappa, const HalfPlanePoint& z, double eta) {
  require(kappa > 4.0 && kappa < 8.0, ErrorKind::InvalidArgument, "cardy_triangle: kappa must lie in (4, 8)");
  require(eta < 0.0, ErrorKind::InvalidArgument, "cardy_triangle: eta must be negative");
  const double e0 = -4.0 / kappa, e1 = 8.0 / kappa - 2.0;
  const cplx zv = z.value();
  if (z.on_boundary()) {
    const double x = z.x();
    if (x == 0.0) return 0.0;
    if (x > 0.0) {
      auto f = [&](double s, double) { return cplx(std::pow(x * s, e0) * std::pow(x * s - eta, e1)); };
      return x * integrate_singular(f, e0, 0.0);
    }
    require(x >= eta, ErrorKind::InvalidArgument, "cardy_triangle: boundary point beyond eta");
    // along (x, 0) the factor zeta^{-4/k} carries the phase e^{-4 pi i / k}
    const bool at_eta = x == eta;
    // x s - eta = (x - eta) + x (1 - s), exact at the far end when x = eta
    auto f = [&](double s, double sbar) { return boundary_pow(x * s, e0) * std::pow((x - eta) - x * sbar, e1); };
    return x * integrate_singular(f, e0, at_eta ? e1 : 0.0);
  }
  require(zv.imag() > 0.0, ErrorKind::InvalidArgument, "cardy_triangle: z must lie in the closed half-plane");
  auto f = [&](double s, double) {
    const cplx zeta = zv * s;
    return std::pow(zeta, e0) * std::pow(zeta - eta, e1);
  };
  return zv * integrate_singular(f, e0, 0.0);
}

TriangleProbabilities cardy_triangle(double kappa, const HalfPlanePoint& z, double eta) {
  const double e0 = -4.0 / kappa, e1 = 8.0 / kappa - 2.0;
  const double e_inf = -e0 - e1 - 2.0;  // behaviour of the substituted tail at v -> 0
  // \int_0^\infty = \int_0^1 + \int_0^1 f(1/v) v^{-2} dv
  const double head = integrate_singular([&](double s, double) { return std::pow(s, e0) * std::pow(s - eta, e1); }, e0, 0.0);
  const double tail = integrate_singular(
      [&](double v, double) { return std::pow(1.0 / v, e0) * std::pow(1.0 / v - eta, e1) / (v * v); }, e_inf, 0.0);
  const double norm = head + tail;
  TriangleProbabilities out;
  out.n_z = cardy_triangle_integral(kappa, z, eta) / norm;
  out.n_eta = cardy_triangle_integral(kappa, HalfPlanePoint::boundary(eta), eta) / norm;
  // barycentric coordinates of N(z) in the triangle N(0) = 0, N(inf) = 1, N(eta)
  out.equal = out.n_z.imag() / out.n_eta.imag();
  out.later = out.n_z.real() - out.n_z.imag() * out.n_eta.real() / out.n_eta.imag();
  return out;
}

double beffara_1pt(double kappa, cplx z) {
  require(kappa > 0.0 && kappa < 8.0, ErrorKind::InvalidArgument, "beffara_1pt: kappa must lie in (0, 8)");
  require(z.imag() > 0.0, ErrorKind::InvalidArgument, "beffara_1pt: z must be interior");
  return std::pow(z.imag(), kappa / 8.0 + 8.0 / kappa - 2.0) * std::pow(std::abs(z), 1.0 - 8.0 / kappa);
}

ScreeningExponents screening_exponents(double kappa, double sigma1, double sigma2, double s) {
  const double a = Numerology::from_kappa(kappa).a;
  return {sigma1 * s, sigma2 * s, s * a, s * (a + sigma1 + sigma2)};
}

cplx screening_observable(double kappa, double sigma1, double sigma2, double s, ScreeningArc arc, double eta1,
                          double eta2) {
  require(eta1 != 0.0 && eta2 != 0.0 && eta1 != eta2, ErrorKind::InvalidArgument,
          "screening: eta1, eta2 must be distinct and nonzero");
  const double a = Numerology::from_kappa(kappa).a;
  const auto ex = screening_exponents(kappa, sigma1, sigma2, s);
  const cplx prefactor =
      boundary_pow(eta1, sigma1 * a) * boundary_pow(eta2, sigma2 * a) * boundary_pow(eta1 - eta2, sigma1 * sigma2);
  // integrand at zeta with the differences zeta - eta1, zeta - eta2 supplied
  auto n = [&](double zeta, double d1, double d2) {
    return boundary_pow(zeta, ex.origin) * boundary_pow(d1, ex.eta1) * boundary_pow(d2, ex.eta2);
  };
  auto check = [](double e, const char* where) {
    require(e > -1.0, ErrorKind::Integrability, std::string("screening: not integrable at ") + where);
  };
  auto between = [](double x, double lo, double hi) { return std::min(lo, hi) < x && x < std::max(lo, hi); };

  if (arc == ScreeningArc::EtaOneToEtaTwo) {
    require(!between(0.0, eta1, eta2), ErrorKind::InvalidArgument, "screening: arc eta1 eta2 passes through p = 0");
    check(ex.eta1, "eta1");
    check(ex.eta2, "eta2");
    const double d = eta2 - eta1;
    auto f = [&](double t, double tbar) { return n(eta1 + d * t, d * t, -d * tbar); };
    return prefactor * d * integrate_singular(f, ex.eta1, ex.eta2);
  }
  const bool one = arc == ScreeningArc::EtaOneToQ;
  const double start = one ? eta1 : eta2;
  const double other = one ? eta2 : eta1;
  const double e_start = one ? ex.eta1 : ex.eta2;
  const double dir = start > 0.0 ? 1.0 : -1.0;
  require(!(dir * (other - start) > 0.0), ErrorKind::InvalidArgument, "screening: arc to q passes the other point");
  check(e_start, one ? "eta1" : "eta2");
  require(ex.infinity < -1.0, ErrorKind::Integrability, "screening: not integrable at q");
  // zeta = start + dir v / (1 - v)
  auto g = [&](double v, double u) {
    const double zeta = start + dir * v / u;
    const double step = dir * v / u;
    return n(zeta, one ? step : zeta - eta1, one ? zeta - eta2 : step) / (u * u);
  };
  return prefactor * dir * integrate_singular(g, e_start, -ex.infinity - 2.0);
}

}  // namespace cftlab
