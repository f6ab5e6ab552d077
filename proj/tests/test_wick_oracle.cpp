#include <doctest.h>

#include "cftlab/wick.hpp"
#include "gen.hpp"
#include "wick_oracle.hpp"

using namespace cftlab;

TEST_CASE("oracle: involution counts") {
  // telephone numbers
  const std::size_t expect[] = {1, 1, 2, 4, 10, 26, 76, 232, 764};
  for (int n = 0; n <= 8; ++n) {
    std::vector<std::vector<int>> all;
    oracle::involutions(n, all);
    CHECK(all.size() == expect[n]);
  }
}

TEST_CASE("correlate equals the naive pairing sum bit for bit") {
  Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    int entries = g.integer(1, 5);
    auto pts = g.separated(entries + 1, 0.2);
    std::vector<oracle::Placed> string;
    CorrelationQuery q;
    int budget = 8;
    for (int e = 0; e < entries && budget > 0; ++e) {
      WickMonomial m;
      int nf = std::min(budget, g.integer(1, 3));
      budget -= nf;
      for (int k = 0; k < nf; ++k) m.factors.push_back({g.integer(0, 2), g.integer(0, 2)});
      m.coefficient = cplx(g.uniform(-1, 1), g.uniform(-1, 1));
      auto p = g.integer(0, 4) == 0 ? HalfPlanePoint::boundary(pts[e].real()) : HalfPlanePoint::interior(pts[e]);
      string.push_back({m, p});
      q.entries.push_back({FieldExpr::monomial(m), p});
    }
    switch (g.integer(0, 3)) {
      case 0: q.background = Background::none(); break;
      case 1: q.background = Background::bmod(g.uniform(-1, 1)); break;
      case 2: q.background = Background::insertion(g.uniform(0.3, 1.2), g.uniform(-0.5, 0.5)); break;
      default: q.background = Background::point_insertion(cplx(g.uniform(-1, 1), g.uniform(-1, 1)), pts.back());
    }
    bool collide = false;
    for (std::size_t a = 0; a < string.size(); ++a)
      for (std::size_t b = a + 1; b < string.size(); ++b)
        collide = collide || string[a].point.value() == string[b].point.value();
    if (collide) continue;
    cplx engine = correlate(q);
    cplx naive = oracle::expectation(string, q.background);
    CHECK(engine == naive);
  }
}
