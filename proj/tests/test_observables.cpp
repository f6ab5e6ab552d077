#include <doctest.h>

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "cftlab/error.hpp"
#include "cftlab/numerology.hpp"
#include "cftlab/observables.hpp"
#include "cftlab/vertex.hpp"
#include "cftlab/wick.hpp"
#include "gen.hpp"

using namespace cftlab;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

// (1/2) I_{sin^2 t}((m + 1)/2, 1/2) is the normalized integral of sin^m on [0, t], t <= pi/2
double schramm_oracle(double kappa, double theta) {
  const double m = 8.0 / kappa - 2.0;
  const double t = std::min(theta, kPi - theta);
  const double s = std::sin(t);
  const double half = 0.5 * boost::math::ibeta((m + 1.0) / 2.0, 0.5, s * s);
  return theta <= kPi / 2 ? half : 1.0 - half;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

FlowState at_rest(cplx z) { return {z, z, 0.0, 0.0, false}; }

cplx hat_t_engine(double kappa, const std::vector<double>& xs) {
  const auto n = Numerology::from_kappa(kappa);
  CorrelationQuery q;
  q.background = Background::insertion(n.a, n.b);
  for (double x : xs) q.entries.push_back({virasoro_field(n.b), HalfPlanePoint::boundary(x)});
  return correlate(q);
}

}  // namespace

TEST_CASE("schramm formula: goldens") {
  CHECK(std::abs(schramm_left_passage(6.0, kPi / 3) - 0.42581763092247) < 1e-10);
  CHECK(std::abs(schramm_left_passage(8.0 / 3, kPi / 3) - 0.25) < 1e-12);
  CHECK(std::abs(schramm_left_passage(4.0, kPi / 3) - 1.0 / 3.0) < 1e-12);
  for (double kappa : {0.5, 2.0, 6.0, 7.9}) {
    CHECK(std::abs(schramm_left_passage(kappa, kPi / 2) - 0.5) < 1e-13);
    CHECK(schramm_left_passage(kappa, kPi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(schramm_left_passage(kappa, 0.0) == 0.0);
  }
  CHECK_THROWS_AS(schramm_left_passage(8.0, 1.0), Error);
  CHECK_THROWS_AS(schramm_left_passage(4.0, 3.5), Error);
}

TEST_CASE("property: schramm formula against the incomplete beta and reflection") {
  Gen g(21);
  for (int k = 0; k < 60; ++k) {
    const double kappa = g.uniform(0.3, 7.95), theta = g.uniform(0.0, kPi);
    const double v = schramm_left_passage(kappa, theta);
    CHECK(std::abs(v - schramm_oracle(kappa, theta)) < 1e-10);
    CHECK(std::abs(v + schramm_left_passage(kappa, kPi - theta) - 1.0) < 1e-12);
  }
}

TEST_CASE("cardy boundary hit") {
  CHECK(cardy_boundary_hit(6.0, 0.0) == 0.0);
  CHECK(cardy_boundary_hit(6.0, 1.0) == 1.0);
  CHECK(std::abs(cardy_boundary_hit(6.0, 0.5) - 0.5) < 1e-12);
  Gen g(3);
  for (int k = 0; k < 40; ++k) {
    const double kappa = g.uniform(4.05, 7.95), u = g.uniform(0.0, 1.0);
    const double oracle = boost::math::ibeta(8.0 / kappa - 1.0, 1.0 - 4.0 / kappa, u);
    CHECK(std::abs(cardy_boundary_hit(kappa, u) - oracle) < 1e-10);
  }
  double prev = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double v = cardy_boundary_hit(6.0, k / 100.0);
    CHECK(v > prev);
    prev = v;
  }
  // small u: u^{1/3} / ((8/k - 1) C_k), with C_k = B(1/3, 1/3)
  const double u = 1e-6;
  const double lead = std::pow(u, 1.0 / 3.0) / ((1.0 / 3.0) * boost::math::beta(1.0 / 3.0, 1.0 / 3.0));
  CHECK(std::abs(cardy_boundary_hit(6.0, u) / lead - 1.0) < 1e-3);
  CHECK(cardy_boundary_hit(6.0, 1e-12) < 1e-3);
  CHECK_THROWS_AS(cardy_boundary_hit(4.0, 0.5), Error);
}

TEST_CASE("cardy triangle") {
  const auto t = cardy_triangle(6.0, HalfPlanePoint::interior(I), -1.0);
  // at kappa = 6 the triangle is equilateral
  CHECK(rel(t.n_eta, std::exp(I * kPi / 3.0)) < 1e-10);
  CHECK(t.equal > 0.0);
  CHECK(t.later > 0.0);
  CHECK(t.equal + t.later < 1.0);
  const auto near_p = cardy_triangle(6.0, HalfPlanePoint::interior({1e-12, 1e-12}), -1.0);
  CHECK(near_p.equal < 1e-3);
  CHECK(near_p.later < 1e-3);
  const auto near_q = cardy_triangle(6.0, HalfPlanePoint::boundary(1e12), -1.0);
  CHECK(std::abs(near_q.later - 1.0) < 1e-2);
  CHECK(std::abs(near_q.equal) < 1e-12);
  const auto at_eta = cardy_triangle(5.0, HalfPlanePoint::boundary(-1.0), -1.0);
  CHECK(std::abs(at_eta.equal - 1.0) < 1e-10);
  CHECK(std::abs(at_eta.later) < 1e-10);
  CHECK_THROWS_AS(cardy_triangle(6.0, HalfPlanePoint::interior(I), 1.0), Error);
}

TEST_CASE("beffara one-point function") {
  CHECK(beffara_1pt(6.0, I) == doctest::Approx(1.0));
  const double expect = std::pow(2.0, 6.0 / 8 + 8.0 / 6 - 2) * std::pow(2.0, 1.0 - 8.0 / 6);
  CHECK(std::abs(beffara_1pt(6.0, 2.0 * I) - expect) < 1e-14);
  // equal to the vertex (b - a, b - a) with the insertion, up to a constant
  Gen g(8);
  const auto n = Numerology::from_kappa(6.0);
  cplx ratio0 = 0.0;
  for (int k = 0; k < 10; ++k) {
    const cplx z = g.upper();
    StarProduct sp{{{n.b - n.a, n.b - n.a, HalfPlanePoint::interior(z)}}, true, 6.0};
    const cplx ratio = star_correlator(sp) / beffara_1pt(6.0, z);
    if (k == 0) ratio0 = ratio;
    CHECK(rel(ratio, ratio0) < 1e-12);
  }
}

TEST_CASE("catalogue dims follow the vertex bookkeeping") {
  for (double kappa : {2.0, 3.0, 16.0 / 3, 6.0}) {
    const auto n = Numerology::from_kappa(kappa);
    const auto w = catalogue("wedge", kappa);
    CHECK(std::abs(w.lambda) < 1e-14);
    CHECK(std::abs(w.lambda_q - (1.0 - 4.0 / kappa)) < 1e-13);
    const auto s = catalogue("strip", kappa);
    CHECK(std::abs(s.lambda - (8.0 / kappa - 1.0)) < 1e-13);
    CHECK(std::abs(s.lambda_q) < 1e-13);
    const auto h = catalogue("halfplane-deriv", kappa);
    CHECK(std::abs(h.lambda - (3.0 / kappa - 0.5)) < 1e-13);
    CHECK(std::abs(h.lambda_q + h.lambda) < 1e-13);
    const auto b = catalogue("beffara", kappa);
    CHECK(std::abs(b.lambda - (1.0 - kappa / 8.0) / 2.0) < 1e-13);
    CHECK(b.lambda_star == b.lambda);
    for (const auto& spec : {w, s, h, b}) {
      REQUIRE(spec.from_vertex);
      const auto d = vertex_dims(spec.sigma, spec.sigma_star, n.b);
      CHECK(d.lambda == spec.lambda);
      CHECK(d.lambda_star == spec.lambda_star);
      StarProduct sp{{{spec.sigma, spec.sigma_star, HalfPlanePoint::interior(I)}}, true, kappa};
      CHECK(sp.lambda_q() == spec.lambda_q);
    }
    // wedge: w^{1 - 4/k}; strip: w^{-lambda}; halfplane-deriv: w^{-2 lambda}
    const cplx z(0.4, 0.9);
    CHECK(rel(w.m({&z, 1}), std::pow(z, 1.0 - 4.0 / kappa)) < 1e-13);
    CHECK(rel(s.m({&z, 1}), std::pow(z, -s.lambda)) < 1e-13);
    CHECK(rel(h.m({&z, 1}), std::pow(z, -2.0 * h.lambda)) < 1e-13);
  }
  CHECK_THROWS_AS(catalogue("nope", 2.0), Error);
  CHECK(catalogue_ids().size() == 7);
}

TEST_CASE("catalogue examples") {
  for (double kappa : {2.0, 8.0 / 3, 6.0}) {
    const auto t = catalogue("hatT-1pt", kappa);
    const FlowState st = at_rest(I);
    CHECK(rel(flow_value(t, {&st, 1}), -Numerology::from_kappa(kappa).h) < 1e-14);
    CHECK(t.kind == FormKind::SchwarzianForm);
  }
  const auto ss = catalogue("schramm-sheffield-1pt", 4.0);
  const cplx z(-0.3, 0.5);
  const FlowState st = at_rest(z);
  CHECK(rel(flow_value(ss, {&st, 1}), std::sqrt(2.0) * std::arg(z)) < 1e-14);
  // wedge at kappa 2: M = 1/w, so Im M is minus the Poisson kernel y/|z|^2 at 0
  const auto w = catalogue("wedge", 2.0);
  CHECK(rel(w.m({&z, 1}).imag(), -z.imag() / std::norm(z)) < 1e-14);
  const auto bos = catalogue("bosonic-2pt", 4.0);
  const FlowState two[] = {at_rest(z), at_rest(cplx(0.7, 1.2))};
  const double g = green(HalfPlanePoint::interior(two[0].z), HalfPlanePoint::interior(two[1].z));
  CHECK(rel(flow_value(bos, two), 2.0 * g + 2.0 * std::arg(two[0].z) * std::arg(two[1].z)) < 1e-14);
  CHECK_THROWS_AS(flow_value(bos, {&st, 1}), Error);
  const auto shifted = with_lambda_shift(w, 0.1);
  CHECK(shifted.lambda == doctest::Approx(0.1));
  CHECK(shifted.lambda_star == 0.0);
}

TEST_CASE("fw recursion: base cases and wick engine") {
  CHECK(fw_recursion(8.0 / 3, {}) == 1.0);
  const double one[] = {1.7};
  CHECK(fw_recursion(8.0 / 3, one) == doctest::Approx(0.625 / (1.7 * 1.7)).epsilon(1e-15));
  const double x1[] = {1.0};
  CHECK(fw_recursion(8.0 / 3, x1) == 0.625);
  Gen g(13);
  for (double kappa : {8.0 / 3, 2.0, 4.0, 5.0}) {
    for (int n = 1; n <= 3; ++n) {
      std::vector<double> xs;
      while (static_cast<int>(xs.size()) < n) {
        const double x = g.uniform(-3.0, 3.0);
        bool ok = std::abs(x) > 0.2;
        for (double y : xs) ok = ok && std::abs(x - y) > 0.2;
        if (ok) xs.push_back(x);
      }
      const cplx e = hat_t_engine(kappa, xs);
      CHECK(std::abs(e.imag()) < 1e-10);
      CHECK(std::abs(fw_recursion(kappa, xs) - e.real()) < 1e-8 * std::max(1.0, std::abs(e.real())));
    }
  }
  const double pair[] = {1.0, 2.0};
  CHECK(std::abs(fw_recursion(8.0 / 3, pair) - hat_t_engine(8.0 / 3, {1.0, 2.0}).real()) < 1e-8);
  const double zero[] = {0.0};
  CHECK_THROWS_AS(fw_recursion(2.0, zero), Error);
  const double same[] = {1.0, 1.0};
  CHECK_THROWS_AS(fw_recursion(2.0, same), Error);
}

TEST_CASE("property: fw recursion is symmetric in its points") {
  Gen g(99);
  for (int k = 0; k < 20; ++k) {
    const double kappa = g.uniform(1.0, 7.0);
    std::vector<double> xs{g.uniform(0.3, 1.0), g.uniform(-2.0, -1.2), g.uniform(1.5, 3.0)};
    const double base = fw_recursion(kappa, xs);
    std::sort(xs.begin(), xs.end());
    do {
      CHECK(std::abs(fw_recursion(kappa, xs) - base) < 1e-10 * std::max(1.0, std::abs(base)));
    } while (std::next_permutation(xs.begin(), xs.end()));
  }
}

TEST_CASE("screening: exponents and integrability") {
  for (double kappa : {2.0, 8.0 / 3, 6.0}) {
    const auto n = Numerology::from_kappa(kappa);
    for (double lambda : {0.0, 0.3, 1.0}) {
      const double s1 = n.b - std::sqrt(n.b * n.b + 2.0 * lambda);
      CHECK(screening_exponents(kappa, s1, 0.0, -2.0 * n.a).eta1 > -1.0);
    }
  }
  const auto n = Numerology::from_kappa(6.0);
  // screening charge 2a + 2b with sigma1 = 2b at kappa 6 is not integrable at eta1
  try {
    screening_observable(6.0, -1.0, 0.0, 2.0 * n.a + 2.0 * n.b, ScreeningArc::EtaOneToEtaTwo, -2.0, -1.0);
    FAIL("expected an integrability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Integrability);
    CHECK(std::string(e.what()).find("eta1") != std::string::npos);
  }
  CHECK_THROWS_AS(screening_observable(6.0, 2 * n.b, 0.0, -2 * n.a, ScreeningArc::EtaOneToEtaTwo, -1.0, 1.0), Error);
  CHECK_THROWS_AS(screening_observable(6.0, 2 * n.b, 0.0, -2 * n.a, ScreeningArc::EtaOneToQ, -1.0, -2.0), Error);
}

TEST_CASE("screening reduces to the triangle integrand") {
  for (double kappa : {5.0, 6.0, 7.0}) {
    const auto n = Numerology::from_kappa(kappa);
    const double e1 = -2.0, e2 = -0.5;
    const cplx s = screening_observable(kappa, 2.0 * n.b, 0.0, -2.0 * n.a, ScreeningArc::EtaOneToEtaTwo, e1, e2);
    const cplx tri = cardy_triangle_integral(kappa, HalfPlanePoint::boundary(e2), e1) -
                     cardy_triangle_integral(kappa, HalfPlanePoint::boundary(e1), e1);
    const cplx boundary_power = std::pow(2.0, 1.0 - 4.0 / kappa) * std::exp(I * kPi * (1.0 - 4.0 / kappa));
    CHECK(rel(s, tri * boundary_power) < 1e-9);
  }
}

TEST_CASE("screening: arcs to q") {
  // sigma1 = sigma2 = 0: only zeta^{s a}, so the q arc from eta < 0 is
  // \int_{-inf}^{eta} |zeta|^{sa} e^{i pi s a} with the sign of the orientation
  const double kappa = 3.0, s = -1.8;
  const double a = Numerology::from_kappa(kappa).a;
  const double p = s * a;
  const cplx v = screening_observable(kappa, 0.0, 0.0, s, ScreeningArc::EtaOneToQ, -2.0, -1.0);
  const cplx expect = -std::pow(2.0, p + 1.0) / (-(p + 1.0)) * std::exp(I * kPi * p);
  CHECK(rel(v, expect) < 1e-9);
  const cplx r = screening_observable(kappa, 0.0, 0.0, s, ScreeningArc::EtaTwoToQ, -1.0, 3.0);
  CHECK(rel(r, std::pow(3.0, p + 1.0) / (-(p + 1.0))) < 1e-9);
  try {
    screening_observable(kappa, 0.0, 0.0, -0.1, ScreeningArc::EtaTwoToQ, -1.0, 3.0);
    FAIL("expected an integrability error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(" q") != std::string::npos);
  }
}

TEST_CASE("martingale drift: small runs") {
  SimOptions o;
  o.kappa = 4.0;
  const auto ss = catalogue("schramm-sheffield-1pt", 4.0);
  FlowFunctional m = [&](std::span<const FlowState> st) { return flow_value(ss, st); };
  const std::vector<std::vector<HalfPlanePoint>> pts{{HalfPlanePoint::interior(I)},
                                                     {HalfPlanePoint::interior({-0.5, 0.8})}};
  const auto r = martingale_drift(o, m, pts, 0.5, 2000, 1);
  for (const auto& d : r) CHECK(d.worst() < 3.5);

  o.kappa = 2.0;
  const auto w = with_lambda_shift(catalogue("wedge", 2.0), 0.3);
  FlowFunctional bad = [&](std::span<const FlowState> st) { return flow_value(w, st); };
  const auto rb = martingale_drift(o, bad, {{HalfPlanePoint::interior({0.2, 0.6})}}, 0.5, 2000, 1);
  CHECK(rb[0].worst() > 3.0);
}
