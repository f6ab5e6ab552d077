#pragma once

#include <functional>
#include <map>
#include <vector>

#include "cftlab/wick.hpp"

namespace cftlab {

struct LaurentWindow {
  cplx center;
  double radius = 0.0;
  int samples = 256;
  int n_min = -4;
  int n_max = 2;
};

// Throws WindowViolation unless the circle stays in H, avoids every obstacle
// and its reflection, and the coefficient range fits in half the samples.
void validate_window(const LaurentWindow& w, const std::vector<cplx>& obstacles);

// c_n = (1/2 pi i) \oint f(zeta) (zeta - z)^{-n-1} dzeta by the trapezoid rule.
std::map<int, cplx> laurent_extract(const std::function<cplx(cplx)>& f, const LaurentWindow& w,
                                    const std::vector<cplx>& obstacles = {});

struct ContourOptions {
  int samples = 256;
  // radius as a fraction of min(Im z, distance to the nearest obstacle)
  double radius_fraction = 0.5;
};

// Points the contour must keep clear of: probe nodes and the background source.
std::vector<cplx> obstacles_of(const CorrelationQuery& probe);
double admissible_radius(cplx z, const std::vector<cplx>& obstacles);

// E[(X *_n Y)(z) probe] for n in [nMin, nMax].
std::map<int, cplx> ope_coefficients(const FieldExpr& x, const FieldExpr& y, const HalfPlanePoint& z,
                                     const CorrelationQuery& probe, int n_min, int n_max,
                                     const ContourOptions& opts = {});
cplx ope_coeff(const FieldExpr& x, int n, const FieldExpr& y, const HalfPlanePoint& z,
               const CorrelationQuery& probe, const ContourOptions& opts = {});

// E[(L_n Y)(z) probe] with T built from the background's b.
cplx virasoro_mode(int n, const FieldExpr& y, const HalfPlanePoint& z, const CorrelationQuery& probe,
                   const ContourOptions& opts = {});

// (1/2 pi i) \oint (zeta - z)^power F(zeta) dzeta
struct Mode {
  FieldExpr field;
  int power = 0;
};

Mode virasoro_mode_op(int n, double b);
Mode current_mode_op(int n);

// E[(A_1 A_2 ... A_k Y)(z) probe], modes listed outer to inner, radii decreasing.
cplx apply_modes(const std::vector<Mode>& modes, const std::vector<double>& radii, const FieldExpr& y,
                 const HalfPlanePoint& z, const CorrelationQuery& probe, int samples);

// E[(A B - B A) Y probe] using one M x M grid; r_outer > r_inner.
cplx nested_commutator(const Mode& a, const Mode& b, const FieldExpr& y, const HalfPlanePoint& z,
                       const CorrelationQuery& probe, int samples, double r_inner, double r_outer);

enum class ModeAlgebra { Virasoro, Heisenberg };

struct CommutatorResult {
  cplx commutator;
  cplx expected;
  double residual;
};

// Nested-contour [A_m, A_n] on Y against (m-n)L_{m+n} + (c/12) m(m^2-1) delta, or n delta for currents.
CommutatorResult commutator_residual(ModeAlgebra algebra, int m, int n, const FieldExpr& y,
                                     const HalfPlanePoint& z, const CorrelationQuery& probe, int samples = 128);

double central_charge_measure(double b, int samples = 256);

// |lhs - rhs| / max(1, |lhs|, |rhs|)
double normalized_residual(cplx lhs, cplx rhs);

struct DegeneracyResult {
  cplx t_star_0;
  cplx second_derivative_term;
  double residual;
};

// T *_0 V - (1/2a^2) d^2 V for the rooted vertex with holomorphic charge i*a.
DegeneracyResult degeneracy_residual(double kappa, const HalfPlanePoint& z, const CorrelationQuery& probe,
                                     double a_override = 0.0);

struct SingularVectorResult {
  cplx value;          // E[(L_{-2} + eta L_{-1}^2) V probe]
  double residual;     // value normalized by the largest intermediate magnitude
  bool degenerate;     // analytic expectation for this (sigma, eta)
};

SingularVectorResult singular_vector_residual(double kappa, bool use_eta_prime, double sigma,
                                              const HalfPlanePoint& z, const CorrelationQuery& probe,
                                              bool nested = false);

}  // namespace cftlab
