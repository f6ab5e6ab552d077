#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cftlab/halfplane.hpp"

namespace cftlab {

// d^dOrder dbar^dbarOrder Phi. (0,0) is Phi, (1,0) is J.
struct BasicField {
  int d = 0;
  int dbar = 0;
  auto operator<=>(const BasicField&) const = default;
};

inline BasicField conjugate(BasicField f) { return {f.dbar, f.d}; }

struct WickMonomial {
  std::vector<BasicField> factors;  // kept sorted
  cplx coefficient = 1.0;

  void canonicalize();
};

// Exponential charge. Non-chiral: e^{⊙ alpha Phi} with mu = muStar = alpha,
// optionally multiplied by C^{alpha^2}. Rooted: chiral charges rooted at
// infinity, exp⊙(mu Phi^+ + muStar conj-Phi^+), always carrying the
// self-normalization (z - zbar)^{mu muStar}.
struct ChargeNode {
  cplx mu = 0.0;
  cplx mu_star = 0.0;
  bool rooted = false;
  bool normalized = false;

  static ChargeNode wick_exponential(cplx alpha) { return {alpha, alpha, false, false}; }
  static ChargeNode vertex(cplx alpha) { return {alpha, alpha, false, true}; }
  static ChargeNode rooted_charges(cplx mu, cplx mu_star) { return {mu, mu_star, true, false}; }
  // O^{(sigma, sigmaStar)} = rooted (i sigma, -i sigmaStar)
  static ChargeNode rooted_vertex(double sigma, double sigma_star) {
    return {cplx(0.0, sigma), cplx(0.0, -sigma_star), true, false};
  }

  // Exponent p of the normalization factor (z - zbar)^p (rooted) or C^p (non-chiral).
  cplx self_exponent() const;
  bool operator==(const ChargeNode&) const = default;
};

// One summand of a field expression located at a point z:
// coef * (z - zbar)^{-inv_zzbar} * (factors ⊙ charge).
struct FieldTerm {
  cplx coef = 1.0;
  int inv_zzbar = 0;
  std::vector<BasicField> factors;
  std::optional<ChargeNode> charge;
};

struct FieldExpr {
  std::vector<FieldTerm> terms;

  static FieldExpr identity();
  static FieldExpr monomial(const WickMonomial& m);
  static FieldExpr basic(BasicField f, cplx coef = 1.0);
  static FieldExpr charge(const ChargeNode& node);

  FieldExpr& operator+=(const FieldExpr& other);
  FieldExpr& operator*=(cplx s);
  bool holomorphic() const;
  std::size_t max_factor_count() const;
  void simplify();
};

FieldExpr operator+(FieldExpr a, const FieldExpr& b);
FieldExpr operator*(cplx s, FieldExpr a);

FieldExpr phi_field();
FieldExpr current_field();
FieldExpr current_bar_field();
// T = -1/2 J⊙J + i b dJ in the identity chart of H.
FieldExpr virasoro_field(double b);

FieldExpr field_derivative(const FieldExpr& x, bool holomorphic = true);
FieldExpr field_derivative(const WickMonomial& m, bool holomorphic = true);

// Deterministic mean shift u = m + mStar of the field with holomorphic part m
// and antiholomorphic part mStar.
class Background {
 public:
  enum class Type { None, BMod, Insertion, PointInsertion };

  static Background none();
  static Background bmod(double b);
  // boundary condition change at p = 0, q = infinity: u = 2a arg z
  static Background insertion(double a, double b);
  // e^{⊙ alpha Phi(z0)} inserted: u = 2 alpha G(., z0)
  static Background point_insertion(cplx alpha, cplx z0, double b = 0.0);

  Type type() const { return type_; }
  double a() const { return a_; }
  double b() const { return b_; }
  cplx alpha() const { return alpha_; }
  cplx source() const { return z0_; }
  bool is_zero() const { return type_ == Type::None || type_ == Type::BMod; }

  cplx hol_mean(const HalfPlanePoint& z) const;
  cplx anti_mean(const HalfPlanePoint& z) const;
  // d^d dbar^dbar u at z
  cplx mean(BasicField f, const HalfPlanePoint& z) const;
  Background conjugated() const;

 private:
  Type type_ = Type::None;
  double a_ = 0.0, b_ = 0.0;
  cplx alpha_ = 0.0, z0_ = 0.0;
  KernelSum hol_, anti_;  // variables: Zeta = field point, Z = source point
  std::vector<KernelSum> hol_d_, anti_d_;  // cached derivatives

  void prepare();
};

struct Entry {
  FieldExpr field;
  HalfPlanePoint point;
};

struct CorrelationQuery {
  std::vector<Entry> entries;
  Background background = Background::none();
};

struct PlacedCharge {
  ChargeNode node;
  HalfPlanePoint point;
};

struct EngineOptions {
  std::size_t field_cap = 14;
};

cplx pair_basic(BasicField f1, const HalfPlanePoint& zeta, BasicField f2, const HalfPlanePoint& z);
cplx pair_charge(BasicField f, const HalfPlanePoint& zeta, const ChargeNode& c, const HalfPlanePoint& z);
cplx charge_prefactor(const std::vector<PlacedCharge>& nodes, const Background& background);

// E (or Ê under a nonzero background) of the string. Summation order is part of
// the contract: product terms in lexicographic order of term choices; within a
// term, diagrams in lexicographic order of the partner array, each product
// formed by multiplying, starting from 1, the single value or the pair value
// at every index that is a single or the smaller end of a pair, in increasing
// index order. The term contributes (weight * prefactor) * diagramSum.
cplx correlate(const CorrelationQuery& query, const EngineOptions& options = {});

// One basic-field occurrence of an expanded product term.
struct Occurrence {
  BasicField field;
  std::size_t entry;
  HalfPlanePoint point;
};

struct Diagram {
  std::size_t term = 0;           // index of the product term
  std::vector<std::size_t> partner;  // partner[i] == i: absorbed by mean and charges
  bool annihilated = false;       // some absorbed occurrence has value 0
};

// One fully expanded product term: weight, occurrences and charges.
struct ProductTerm {
  cplx weight = 1.0;
  std::vector<Occurrence> occurrences;
  std::vector<PlacedCharge> charges;
  std::vector<std::size_t> charge_entries;
};

std::vector<ProductTerm> expand_terms(const CorrelationQuery& query);
// Value of an absorbed occurrence: mean plus contractions with charges of other entries.
cplx single_value(const ProductTerm& term, std::size_t i, const Background& background);

std::vector<Diagram> enumerate_diagrams(const CorrelationQuery& query, const EngineOptions& options = {});

CorrelationQuery conjugate(const CorrelationQuery& q);

}  // namespace cftlab
