// One pass/fail line per acceptance criterion; exit status 1 if any fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cftlab/numerology.hpp"
#include "cftlab/observables.hpp"
#include "cftlab/ope.hpp"
#include "cftlab/suites.hpp"
#include "cftlab/wick.hpp"
#include "gen.hpp"
#include "runs.hpp"
#include "wick_oracle.hpp"

using namespace cftlab;
using namespace cftlab::tools;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20240501;

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Verdict wick_oracle() {
  Timer t;
  Gen g(2718);
  int done = 0;
  double worst = 0.0;
  while (done < 200) {
    const int entries = g.integer(1, 5);
    const auto pts = g.separated(entries + 1, 0.2);
    std::vector<oracle::Placed> string;
    CorrelationQuery q;
    int budget = 8;
    for (int e = 0; e < entries && budget > 0; ++e) {
      WickMonomial m;
      const int nf = std::min(budget, g.integer(1, 3));
      budget -= nf;
      for (int k = 0; k < nf; ++k) m.factors.push_back({g.integer(0, 2), g.integer(0, 2)});
      m.coefficient = cplx(g.uniform(-1, 1), g.uniform(-1, 1));
      const auto p = g.integer(0, 4) == 0 ? HalfPlanePoint::boundary(pts[e].real()) : HalfPlanePoint::interior(pts[e]);
      string.push_back({m, p});
      q.entries.push_back({FieldExpr::monomial(m), p});
    }
    bool collide = false;
    for (std::size_t a = 0; a < string.size(); ++a)
      for (std::size_t b = a + 1; b < string.size(); ++b)
        collide = collide || string[a].point.value() == string[b].point.value();
    if (collide) continue;
    switch (g.integer(0, 3)) {
      case 0: q.background = Background::none(); break;
      case 1: q.background = Background::bmod(g.uniform(-1, 1)); break;
      case 2: q.background = Background::insertion(g.uniform(0.3, 1.2), g.uniform(-0.5, 0.5)); break;
      default: q.background = Background::point_insertion(cplx(g.uniform(-1, 1), g.uniform(-1, 1)), pts.back());
    }
    worst = std::max(worst, std::abs(correlate(q) - oracle::expectation(string, q.background)));
    ++done;
  }
  const double secs = t.seconds();
  return {worst == 0.0 && secs < 10.0, fmt::format("{} strings, max |diff| = {:g}, {:.2f} s", done, worst, secs)};
}

Verdict numerology_table() {
  struct Row {
    double kappa, b, a, h, minus_eta;
  };
  const double s3 = std::sqrt(3.0), s2 = std::sqrt(2.0), s24 = std::sqrt(24.0);
  const Row rows[] = {{2.0, -0.5, 1.0, 1.0, 0.5},
                      {8.0, 0.5, 0.5, -1.0 / 8, 2.0},
                      {8.0 / 3, -s3 / 6, s3 / 2, 5.0 / 8, 2.0 / 3},
                      {6.0, s3 / 6, 1.0 / s3, 0.0, 1.5},
                      {3.0, -1.0 / s24, s2 / s3, 0.5, 0.75},
                      {16.0 / 3, 1.0 / s24, s3 / (2 * s2), 1.0 / 16, 4.0 / 3},
                      {4.0, 0.0, 1.0 / s2, 0.25, 1.0}};
  double worst = 0.0;
  for (const auto& r : rows) {
    const auto n = Numerology::from_kappa(r.kappa);
    for (double d : {n.b - r.b, n.a - r.a, n.h - r.h, -n.eta - r.minus_eta, n.kappa * n.kappa_prime - 16.0,
                     n.c - (1.0 - 12.0 * n.b * n.b)})
      worst = std::max(worst, std::abs(d));
  }
  return {worst < 1e-12, fmt::format("7 columns, max deviation {:.3g}", worst)};
}

Verdict central_charge() {
  const double s3 = std::sqrt(3.0);
  double worst = 0.0, slowest = 0.0;
  for (double b : {0.0, 0.5, -0.5, s3 / 6, 1.0 / std::sqrt(24.0)}) {
    Timer t;
    const double c = central_charge_measure(b, 256);
    slowest = std::max(slowest, t.seconds());
    worst = std::max(worst, std::abs(c - (1.0 - 12.0 * b * b)));
  }
  return {worst < 1e-6 && slowest < 1.0, fmt::format("max |c - (1 - 12 b^2)| = {:.3g}, slowest {:.3f} s", worst, slowest)};
}

// Suites with their own tolerances; negative controls must exceed theirs.
Verdict suites(const std::vector<std::string>& names) {
  bool ok = true;
  std::string detail;
  for (const auto& n : names) {
    const SuiteReport r = run_suite(n, {kSeed, 20});
    ok = ok && r.pass();
    double tol = 0.0;
    for (const auto& c : r.cases)
      if (!c.expect_large) tol = std::max(tol, c.tolerance);
    std::size_t controls = 0;
    for (const auto& c : r.cases) controls += c.expect_large ? 1 : 0;
    if (!detail.empty()) detail += "; ";
    detail += fmt::format("{}: {} cases, worst {:.3g} (tol {:g})", n, r.cases.size(), r.worst_residual(), tol);
    if (controls) detail += fmt::format(", {} control(s) {}", controls, r.pass() ? "exceed" : "checked");
  }
  return {ok, detail};
}

Verdict friedrich_werner() {
  const auto n = Numerology::from_kappa(8.0 / 3);
  CorrelationQuery q;
  q.background = Background::insertion(n.a, n.b);
  for (double x : {1.0, 2.0}) q.entries.push_back({virasoro_field(n.b), HalfPlanePoint::boundary(x)});
  const cplx engine = correlate(q);
  const double pair[] = {1.0, 2.0};
  const double fw = fw_recursion(8.0 / 3, pair);
  const double d2 = std::abs(fw - engine.real()) + std::abs(engine.imag());
  double d1 = 0.0;
  for (double x : {1.0, 2.0, 0.5, -4.0}) {
    const double one[] = {x};
    d1 = std::max(d1, std::abs(fw_recursion(8.0 / 3, one) - 0.625 / (x * x)));
  }
  return {d2 < 1e-8 && d1 == 0.0,
          fmt::format("R(1,2) = {:.12g}, engine {:.12g}, diff {:.3g}; max |R(x) - 5/8x^-2| = {:g}", fw, engine.real(),
                      d2, d1)};
}

SimOptions sim(double kappa, unsigned workers = 1) {
  SimOptions o;
  o.kappa = kappa;
  o.dt = 1e-3;
  o.workers = workers;
  return o;
}

std::vector<cplx> schramm_points() {
  return {std::polar(1.0, kPi / 3), std::polar(1.0, kPi / 2), std::polar(1.0, 2 * kPi / 3)};
}

// Both kappas as one CSV document.
std::string schramm_run(unsigned workers, std::vector<EstimateRow>& rows) {
  std::string csv;
  rows.clear();
  for (double kappa : {8.0 / 3, 6.0}) {
    auto r = left_passage_rows(sim(kappa, workers), schramm_points(), 100000, kSeed);
    csv += estimate_csv(r);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return csv;
}

std::string schramm_csv;

Verdict schramm() {
  Timer t;
  std::vector<EstimateRow> rows;
  schramm_csv = schramm_run(1, rows);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double z = *r.z_score();
    ok = ok && std::abs(z) < 3.0 && r.estimate.undecided == 0;
    if (i % 3 == 1) {
      const double zh = (r.estimate.mean - 0.5) / r.estimate.stderr_;
      ok = ok && std::abs(zh) < 3.0;
    }
    detail += fmt::format("{}z={:+.2f} ", i % 3 == 0 ? (i == 0 ? "k=8/3: " : "k=6: ") : "", z);
  }
  detail += fmt::format("({:.0f} s)", t.seconds());
  return {ok, detail};
}

Verdict cardy_hits() {
  Timer t;
  const std::vector<double> us{0.25, 0.5, 0.75, 0.05, 0.075, 0.1, 0.15, 0.2};
  const auto rows = boundary_hit_rows(sim(6.0), 1.0, us, 100000, kSeed);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < 3; ++i) {
    const double z = *rows[i].z_score();
    ok = ok && std::abs(z) < 3.0;
    detail += fmt::format("u={}: z={:+.2f} ", us[i], z);
  }
  std::vector<double> fu, fp;
  for (std::size_t i = 3; i < us.size(); ++i) {
    fu.push_back(us[i]);
    fp.push_back(rows[i].estimate.mean);
  }
  const double slope = log_log_slope(fu, fp);
  ok = ok && std::abs(slope - 1.0 / 3) <= 0.05;
  detail += fmt::format("fit exponent {:.4f} ({:.0f} s)", slope, t.seconds());
  return {ok, detail};
}

Verdict drift_suite() {
  Timer t;
  const std::pair<const char*, double> cases[] = {{"wedge", 2.0},    {"strip", 16.0 / 3},      {"halfplane-deriv", 3.0},
                                                  {"schramm-sheffield-1pt", 4.0}, {"bosonic-2pt", 4.0},
                                                  {"hatT-1pt", 8.0 / 3}, {"beffara", 6.0}};
  bool ok = true;
  std::string detail;
  for (const auto& [id, kappa] : cases) {
    const ObservableSpec spec = catalogue(id, kappa);
    std::vector<std::vector<HalfPlanePoint>> tuples;
    for (const auto& probe : default_drift_probes(spec.arity)) {
      std::vector<HalfPlanePoint> pts;
      for (cplx z : probe) pts.push_back(HalfPlanePoint::interior(z));
      tuples.push_back(std::move(pts));
    }
    auto worst_of = [&](const ObservableSpec& s) {
      FlowFunctional m = [&](std::span<const FlowState> st) { return flow_value(s, st); };
      double w = 0.0;
      for (const auto& r : martingale_drift(sim(kappa), m, tuples, 0.5, 10000, kSeed)) w = std::max(w, r.worst());
      return w;
    };
    const double good = worst_of(spec);
    const double bad = worst_of(with_lambda_shift(spec, 0.5));
    ok = ok && good < 3.0 && bad > 3.0;
    detail += fmt::format("{} {:.2f}/{:.1f} ", id, good, bad);
  }
  detail += fmt::format("(|drift| / shifted control, {:.0f} s)", t.seconds());
  return {ok, detail};
}

Verdict hadamard() {
  double worst = 0.0;
  std::string detail;
  for (double kappa : {8.0 / 3, 4.0, 6.0}) {
    const auto r = hadamard_check(kappa, cplx(0.3, 1.0), cplx(-0.5, 0.7), 0.2, 1e-4, 100, kSeed);
    worst = std::max(worst, r.mean_abs_error);
    detail += fmt::format("k={:.3g}: {:.3g} over {} steps; ", kappa, r.mean_abs_error, r.samples);
  }
  return {worst < 1e-3, detail + "mean |error|"};
}

Verdict determinism() {
  if (schramm_csv.empty()) return {false, "criterion 9 did not run"};
  std::vector<EstimateRow> rows;
  const std::string again = schramm_run(4, rows);
  return {again == schramm_csv, fmt::format("{} bytes, workers 1 vs 4: {}", again.size(),
                                            again == schramm_csv ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"wick oracle equivalence", wick_oracle},
      {"numerology table", numerology_table},
      {"central charge", central_charge},
      {"ward and virasoro OPE suites", [] { return suites({"ward-ope", "virasoro-ope"}); }},
      {"commutators", [] { return suites({"commutators", "heisenberg"}); }},
      {"level-two degeneracy", [] { return suites({"degeneracy"}); }},
      {"equation residual suites", [] { return suites({"cardy", "kz", "ward"}); }},
      {"friedrich-werner cross-check", friedrich_werner},
      {"left passage vs closed form", schramm},
      {"boundary hitting vs closed form", cardy_hits},
      {"martingale drift suite", drift_suite},
      {"hadamard identity", hadamard},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    fmt::print("criterion {:2} {:<32} {}  {}\n", i + 1, criteria[i].first, v.pass ? "PASS" : "FAIL", v.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria pass\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
