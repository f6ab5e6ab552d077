#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "cftlab/error.hpp"
#include "cftlab/observables.hpp"
#include "cftlab/sle.hpp"
#include "gen.hpp"

using namespace cftlab;

namespace {

const cplx I(0.0, 1.0);

EstimateReport left_estimate(const SimOptions& o, cplx z, std::uint64_t n, std::uint64_t seed, unsigned workers = 1) {
  PathFunctional f = [&](std::uint64_t s) {
    const cplx zs[] = {z};
    const Side side = sample_left_passage(o, zs, s)[0];
    if (side == Side::Undecided) return std::vector<std::optional<double>>{std::nullopt};
    return std::vector<std::optional<double>>{side == Side::Left ? 1.0 : 0.0};
  };
  return estimate(f, 1, n, seed, workers)[0];
}

}  // namespace

TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) == C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal stream: reproducible, standard moments") {
  NormalStream a(42), b(42), c(43);
  bool same = true, differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.next(), y = b.next(), z = c.next();
    same = same && x == y;
    differs = differs || x != z;
  }
  CHECK(same);
  CHECK(differs);
  CHECK(a.draws() == 100);

  NormalStream s(7);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.next();
    m1 += x;
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m1 /= n, m2 /= n, m4 /= n;
  CHECK(std::abs(m1) < 4.0 / std::sqrt(n));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("driving path: variance kappa T") {
  const double kappa = 2.0, T = 1.0;
  const int n = 4000;
  double sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto p = sample_driving(kappa, T, 0.01, 1000 + k);
    REQUIRE(p.values.size() == 101);
    CHECK(p.values[0] == 0.0);
    sum2 += p.values.back() * p.values.back();
  }
  CHECK(std::abs(sum2 / n - kappa * T) < 4.0 * kappa * T * std::sqrt(2.0 / n));
  CHECK(sample_driving(0.0, 1.0, 0.1, 3).values.back() == 0.0);
  CHECK_THROWS_AS(sample_driving(2.0, 1.0, 0.0, 1), Error);
}

TEST_CASE("flow at kappa 0: closed forms") {
  // w_t = sqrt(z^2 + 4t) on the upper branch; iy lies on the trace and is hit at y^2/4
  const double dt = 1e-4;
  const auto path = sample_driving(0.0, 1.0, dt, 1);
  for (cplx z : {cplx(0.3, 0.5), cplx(-1.0, 1.0), cplx(2.0, 0.1)}) {
    const auto tr = flow_point(path, HalfPlanePoint::interior(z), 1e-3);
    REQUIRE(tr.w.size() == path.values.size());
    double worst = 0.0;
    for (std::size_t s = 0; s < tr.w.size(); ++s) {
      const double t = static_cast<double>(s) * dt;
      worst = std::max(worst, std::abs(std::norm(tr.w[s]) - std::abs(z * z + 4.0 * t)) / std::abs(z * z + 4.0 * t));
    }
    CHECK(worst < 1e-6);
  }
  const auto hit = flow_point(path, HalfPlanePoint::interior({0.0, 1.0}), 1e-3);
  REQUIRE(hit.final.tau);
  CHECK(std::abs(*hit.final.tau - 0.25) < 1e-3);
  for (std::size_t s = 0; s + 1 < hit.w.size(); ++s)
    CHECK(std::abs(std::norm(hit.w[s]) - (1.0 - 4.0 * s * dt)) < 1e-9);
  const auto tr = flow_point(path, HalfPlanePoint::boundary(1.5), 1e-3);
  CHECK_FALSE(tr.final.swallowed);
  CHECK(std::abs(tr.final.w.real() - std::sqrt(1.5 * 1.5 + 4.0)) < 1e-12);
  CHECK(tr.final.w.imag() == 0.0);
}

TEST_CASE("flow: hydrodynamic normalization far away") {
  Gen g(5);
  for (int k = 0; k < 5; ++k) {
    const double kappa = g.uniform(0.5, 7.5);
    const auto path = sample_driving(kappa, 1.0, 1e-3, 77 + k);
    const cplx z = 1e3 * std::exp(I * g.uniform(0.2, 2.9));
    const auto tr = flow_point(path, HalfPlanePoint::interior(z));
    const cplx expect = z - path.values.back() + 2.0 / z;
    CHECK(std::abs(tr.final.w - expect) / std::abs(z) < 1e-4);
    CHECK(std::abs(tr.final.derivative() - 1.0) < 1e-5);
  }
}

TEST_CASE("flow: derivative and Schwarzian match finite differences") {
  const auto path = sample_driving(3.0, 0.5, 1e-3, 11);
  const cplx z(0.3, 0.8), h = 1e-4;
  auto w_at = [&](cplx p) { return flow_point(path, HalfPlanePoint::interior(p)).final.w; };
  const auto tr = flow_point(path, HalfPlanePoint::interior(z));
  const cplx d1 = (w_at(z + h) - w_at(z - h)) / (2.0 * h);
  CHECK(std::abs(tr.final.derivative() - d1) < 1e-6 * std::abs(d1));
  const cplx hh = 1e-3;
  const cplx wp = w_at(z + hh), wm = w_at(z - hh), w0 = tr.final.w;
  const cplx wpp = w_at(z + 2.0 * hh), wmm = w_at(z - 2.0 * hh);
  const cplx d2 = (wp - 2.0 * w0 + wm) / (hh * hh);
  const cplx d3 = (wpp - 2.0 * wp + 2.0 * wm - wmm) / (2.0 * hh * hh * hh);
  const cplx s = d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1);
  CHECK(std::abs(tr.final.schwarzian - s) < 1e-3 * std::max(1.0, std::abs(s)));
}

TEST_CASE("left passage at kappa 0 is the side of the vertical ray") {
  const auto path = sample_driving(0.0, 2000.0, 0.05, 1);
  SimOptions o;
  o.kappa = 0.0;
  for (double th : {0.3, 1.2, 1.9, 2.8}) {
    const cplx z = std::exp(I * th);
    const Side want = th > std::numbers::pi / 2 ? Side::Left : Side::Right;
    CHECK(left_passage(path, z) == want);
    const cplx zs[] = {z, 2.0 * z};
    const auto got = sample_left_passage(o, zs, 9);
    CHECK(got[0] == want);
    CHECK(got[1] == want);
  }
}

TEST_CASE("left passage at kappa 8/3: symmetric about the imaginary axis") {
  SimOptions o;
  o.kappa = 8.0 / 3.0;
  const auto r = left_estimate(o, I, 4000, 100);
  CHECK(r.undecided == 0);
  CHECK(std::abs(r.mean - 0.5) < 3.0 * r.stderr_);
  const auto p = left_estimate(o, std::exp(I * std::numbers::pi / 3.0), 4000, 100);
  CHECK(std::abs(p.mean - schramm_left_passage(o.kappa, std::numbers::pi / 3.0)) < 3.0 * p.stderr_);
}

TEST_CASE("left passage: halving dt moves the estimate by less than 2 stderr") {
  SimOptions o;
  o.kappa = 8.0 / 3.0;
  const cplx z = std::exp(I * 2.0 * std::numbers::pi / 3.0);
  const auto coarse = left_estimate(o, z, 10000, 5000);
  o.dt /= 2.0;
  const auto fine = left_estimate(o, z, 10000, 5000);
  CHECK(std::abs(coarse.mean - fine.mean) < 2.0 * std::max(coarse.stderr_, fine.stderr_));
}

TEST_CASE("estimate: constant functional and worker independence") {
  const auto one = estimate([](std::uint64_t) { return std::vector<std::optional<double>>{1.0}; }, 1, 1000, 0)[0];
  CHECK(one.mean == 1.0);
  CHECK(one.stderr_ == 0.0);
  CHECK(one.n == 1000);

  PathFunctional f = [](std::uint64_t s) {
    NormalStream r(s);
    const double x = r.next();
    if (x > 2.0) return std::vector<std::optional<double>>{std::nullopt, x};
    if (x < -2.5) throw Error(ErrorKind::HorizonExhausted, "test");
    return std::vector<std::optional<double>>{x, x * x};
  };
  const auto a = estimate(f, 2, 3000, 17, 1);
  for (unsigned w : {2u, 3u, 8u}) {
    const auto b = estimate(f, 2, 3000, 17, w);
    for (int c = 0; c < 2; ++c) {
      CHECK(a[c].mean == b[c].mean);
      CHECK(a[c].stderr_ == b[c].stderr_);
      CHECK(a[c].n == b[c].n);
      CHECK(a[c].undecided == b[c].undecided);
      CHECK(a[c].failures == b[c].failures);
    }
  }
  CHECK(a[0].undecided > 0);
  CHECK(a[0].failures > 0);
  CHECK_THROWS_AS(estimate(f, 1, 0, 0), Error);
}

TEST_CASE("estimate: left passage reproducible across worker counts") {
  SimOptions o;
  o.kappa = 6.0;
  const auto a = left_estimate(o, std::exp(I * 1.0), 600, 3, 1);
  const auto b = left_estimate(o, std::exp(I * 1.0), 600, 3, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("boundary swallow times at kappa 6 follow the Bessel law") {
  // tau for x is x^2 / (2 kappa G), G ~ Gamma(1 - d/2) with d = 1 + 4/kappa
  const double kappa = 6.0, T = 100.0;
  SimOptions o;
  o.kappa = kappa;
  const int n = 3000;
  int alive = 0;
  for (int k = 0; k < n; ++k) {
    AdaptiveDriver drv(o, 900 + k);
    double w = 1.0;
    bool out = false;
    auto m = [&] { return w * w; };
    while (!out && drv.time() < T) {
      drv.step(drv.step_for(w * w, T - drv.time()), m, [&](double h, double pre, double post) {
        if (out) return;
        const double before = w - pre;
        w = std::copysign(std::sqrt(before * before + 4.0 * h), before) - post;
        out = w * before <= 0.0 || std::abs(w) <= o.resolve;
      });
    }
    if (!out) ++alive;
  }
  const double p = boost::math::gamma_p(1.0 - (1.0 + 4.0 / kappa) / 2.0, 1.0 / (2.0 * kappa * T));
  const double frac = static_cast<double>(alive) / n;
  CHECK(std::abs(frac - p) < 3.0 * std::sqrt(p * (1 - p) / n));
  // far from almost sure at T = 100 x^2
  CHECK(p > 0.3);
}

TEST_CASE("swallow order at kappa 6 matches the triangle formula") {
  SimOptions o;
  o.kappa = 6.0;
  o.resolve = 1e-12;
  const auto tri = cardy_triangle(6.0, HalfPlanePoint::interior(I), -1.0);
  PathFunctional f = [&](std::uint64_t s) {
    const auto r = sample_swallow_order(o, I, -1.0, s);
    if (r == SwallowOrder::Undecided) return std::vector<std::optional<double>>{std::nullopt, std::nullopt};
    return std::vector<std::optional<double>>{r == SwallowOrder::Same ? 1.0 : 0.0, r == SwallowOrder::After ? 1.0 : 0.0};
  };
  const auto est = estimate(f, 2, 3000, 40);
  CHECK(est[0].undecided == 0);
  CHECK(std::abs(est[0].mean - tri.equal) < 3.0 * est[0].stderr_);
  CHECK(std::abs(est[1].mean - tri.later) < 3.0 * est[1].stderr_);
}

TEST_CASE("boundary hit estimate at kappa 6") {
  SimOptions o;
  o.kappa = 6.0;
  const double eps[] = {0.5};
  PathFunctional f = [&](std::uint64_t s) {
    const auto r = sample_boundary_hit(o, 1.0, eps, s)[0];
    return std::vector<std::optional<double>>{r ? std::optional<double>(*r ? 1.0 : 0.0) : std::nullopt};
  };
  const auto e = estimate(f, 1, 3000, 70)[0];
  CHECK(std::abs(e.mean - cardy_boundary_hit(6.0, 0.5)) < 3.0 * e.stderr_);
}

TEST_CASE("hadamard identity along fixed-step paths") {
  const auto r = hadamard_check(4.0, cplx(0.3, 1.0), cplx(-0.5, 0.7), 0.2, 1e-4, 5, 1);
  CHECK(r.samples > 0);
  CHECK(r.mean_abs_error < 1e-3);
}

TEST_CASE("samplers reject bad arguments") {
  SimOptions o;
  o.kappa = 6.0;
  const double bad[] = {1.5};
  CHECK_THROWS_AS(sample_boundary_hit(o, 1.0, bad, 1), Error);
  o.kappa = 3.0;
  const double ok[] = {0.5};
  CHECK_THROWS_AS(sample_boundary_hit(o, 1.0, ok, 1), Error);
  const cplx real_point[] = {cplx(1.0, 0.0)};
  CHECK_THROWS_AS(sample_left_passage(o, real_point, 1), Error);
  CHECK_THROWS_AS(FlowTracker::real(0.0), Error);
}
