#pragma once

namespace cftlab {

// SLE/CFT parameter bundle. a > 0 and 2a(a+b) = 1 tie kappa to the
// background charge b.
struct Numerology {
  double kappa;
  double a, b;
  double c;          // central charge 1 - 12 b^2
  double h;          // boundary dimension (6 - kappa)/(2 kappa)
  double h_prime;    // (3 kappa - 8)/16
  double eta;        // -kappa/4
  double eta_prime;  // -4/kappa
  double kappa_prime;  // 16/kappa

  static Numerology from_kappa(double kappa);
  static Numerology from_b(double b);
};

double a_of_b(double b);

}  // namespace cftlab
