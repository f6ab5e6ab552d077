#include <cmath>
#include <bit>
#include <map>
#include <optional>

#include "cftlab/error.hpp"
#include "cftlab/numerology.hpp"
#include "cftlab/observables.hpp"

namespace cftlab {

namespace {

constexpr std::size_t kMaxPoints = 12;

// Rational function in x_0..x_{n-1} as a sum of monomials
// coef * prod x_i^{e_i} * prod_{i<j} (x_i - x_j)^{p_ij}.
class Rational {
 public:
  using Exponents = std::vector<int>;

  explicit Rational(std::size_t n) : n_(n) {}

  static Rational one(std::size_t n) {
    Rational r(n);
    r.terms_[Exponents(n + n * (n - 1) / 2, 0)] = 1.0;
    return r;
  }

  std::size_t pair(std::size_t i, std::size_t j) const { return n_ + i * n_ - i * (i + 1) / 2 + (j - i - 1); }

  // this * coef * x_i^{dx} * (x_i - x_j)^{dp}, i < j (dp ignored when j == i)
  void add_scaled(const Rational& r, double coef, std::size_t i, int dx, std::size_t j, int dp) {
    for (const auto& [e, c] : r.terms_) {
      Exponents f = e;
      f[i] += dx;
      if (j != i) f[pair(i, j)] += dp;
      add(std::move(f), coef * c);
    }
  }

  Rational derivative(std::size_t j) const {
    Rational out(n_);
    for (const auto& [e, c] : terms_) {
      if (e[j] != 0) {
        Exponents f = e;
        --f[j];
        out.add(std::move(f), c * e[j]);
      }
      for (std::size_t i = 0; i < n_; ++i) {
        if (i == j) continue;
        const std::size_t p = i < j ? pair(i, j) : pair(j, i);
        if (e[p] == 0) continue;
        Exponents f = e;
        --f[p];
        out.add(std::move(f), (i < j ? -1.0 : 1.0) * c * e[p]);
      }
    }
    return out;
  }

  Rational& operator+=(const Rational& o) {
    for (const auto& [e, c] : o.terms_) add(e, c);
    return *this;
  }

  double evaluate(std::span<const double> x) const {
    double total = 0.0;
    for (const auto& [e, c] : terms_) {
      double v = c;
      for (std::size_t i = 0; i < n_; ++i) {
        if (e[i] != 0) v *= std::pow(x[i], e[i]);
        for (std::size_t j = i + 1; j < n_; ++j)
          if (int p = e[pair(i, j)]; p != 0) v *= std::pow(x[i] - x[j], p);
      }
      total += v;
    }
    return total;
  }

 private:
  void add(Exponents e, double c) {
    if (c == 0.0) return;
    auto [it, fresh] = terms_.try_emplace(std::move(e), c);
    if (!fresh && (it->second += c) == 0.0) terms_.erase(it);
  }

  std::size_t n_;
  std::map<Exponents, double> terms_;
};

class FwRecursion {
 public:
  FwRecursion(double kappa, std::size_t n) : n_(n), memo_(std::size_t{1} << n) {
    const Numerology num = Numerology::from_kappa(kappa);
    h_ = num.h;
    c_ = num.c;
  }

  const Rational& of(unsigned set) {
    if (memo_[set]) return *memo_[set];
    if (set == 0) return memo_[set].emplace(Rational::one(n_));
    const std::size_t k = static_cast<std::size_t>(std::countr_zero(set));
    const unsigned rest = set & (set - 1);
    const Rational& r = of(rest);
    Rational out(n_);
    out.add_scaled(r, h_, k, -2, k, 0);
    for (std::size_t j = k + 1; j < n_; ++j) {
      if (!(rest >> j & 1u)) continue;
      const Rational d = r.derivative(j);
      out.add_scaled(d, -1.0, k, -1, k, 0);
      out.add_scaled(d, 1.0, k, 0, j, -1);
      out.add_scaled(r, 2.0, k, 0, j, -2);
      out.add_scaled(of(rest & ~(1u << j)), c_ / 2.0, k, 0, j, -4);
    }
    return memo_[set].emplace(std::move(out));
  }

 private:
  std::size_t n_;
  double h_ = 0.0, c_ = 0.0;
  std::vector<std::optional<Rational>> memo_;
};

}  // namespace

double fw_recursion(double kappa, std::span<const double> xs) {
  require(xs.size() <= kMaxPoints, ErrorKind::CapExceeded, "fw_recursion: too many points");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(xs[i] != 0.0 && std::isfinite(xs[i]), ErrorKind::InvalidArgument, "fw_recursion: points must be nonzero");
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      require(xs[i] != xs[j], ErrorKind::CoincidentPoints, "fw_recursion: coincident points");
  }
  FwRecursion rec(kappa, xs.size());
  const unsigned all = static_cast<unsigned>((std::size_t{1} << xs.size()) - 1);
  return rec.of(all).evaluate(xs);
}

}  // namespace cftlab
