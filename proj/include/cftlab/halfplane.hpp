#pragma once

#include <complex>
#include <vector>

namespace cftlab {

using cplx = std::complex<double>;

// A point of the closed upper half-plane. Boundary points carry an explicit
// flag; an interior point with a tiny imaginary part stays interior.
class HalfPlanePoint {
 public:
  static HalfPlanePoint interior(cplx z);
  static HalfPlanePoint boundary(double x);

  cplx value() const { return z_; }
  bool on_boundary() const { return boundary_; }
  double x() const { return z_.real(); }
  double y() const { return z_.imag(); }

  friend bool operator==(const HalfPlanePoint&, const HalfPlanePoint&) = default;

 private:
  HalfPlanePoint(cplx z, bool b) : z_(z), boundary_(b) {}
  cplx z_;
  bool boundary_ = false;
};

// Wirtinger variables of a two-point kernel: the probe point and the source point.
enum class Var { Zeta, ZetaBar, Z, ZBar };

bool is_barred(Var v);

struct RationalTerm {
  cplx coef;
  Var a, b;
  int power;  // coef / (a - b)^power
};

struct LogTerm {
  cplx coef;
  Var a, b;  // coef * log(a - b)
};

// Sum of terms coef/(a-b)^n and coef*log(a-b) in four independent variables.
// A log whose first variable is barred is evaluated as conj(log(conj(a)-conj(b))),
// so that a real combination such as 2G stays real.
class KernelSum {
 public:
  std::vector<RationalTerm> terms;
  std::vector<LogTerm> logs;

  KernelSum derivative(Var v) const;
  KernelSum derivative(Var v, int times) const;
  cplx evaluate(cplx zeta, cplx z) const;

  KernelSum& operator+=(const KernelSum& other);
  KernelSum& operator*=(cplx s);
  bool empty() const { return terms.empty() && logs.empty(); }

 private:
  void normalize();
};

// The log kernel 2G = log(zeta-zbar)+log(zetabar-z)-log(zeta-z)-log(zetabar-zbar).
KernelSum twice_green_kernel();

double green(const HalfPlanePoint& zeta, const HalfPlanePoint& z);

// 2 d_zeta^alpha dbar_zeta^beta d_z^gamma dbar_z^delta G as a kernel sum.
KernelSum green_mixed_partial(int alpha, int beta, int gamma, int delta);

struct ConformalRadiusData {
  double radius;         // C
  double log_radius;     // c = log C
  cplx d_log_radius;     // dc
  cplx domain_schwarzian;  // S
};

ConformalRadiusData conformal_radius_data(const HalfPlanePoint& z);

}  // namespace cftlab
