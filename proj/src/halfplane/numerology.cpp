#include "cftlab/numerology.hpp"

#include <cmath>

#include "cftlab/error.hpp"

namespace cftlab {

namespace {

Numerology fill(double kappa, double a, double b) {
  Numerology n{};
  n.kappa = kappa;
  n.a = a;
  n.b = b;
  n.c = 1.0 - 12.0 * b * b;
  n.h = 3.0 / kappa - 0.5;
  n.h_prime = (3.0 * kappa - 8.0) / 16.0;
  n.eta = -kappa / 4.0;
  n.eta_prime = -4.0 / kappa;
  n.kappa_prime = 16.0 / kappa;
  return n;
}

}  // namespace

double a_of_b(double b) { return (std::sqrt(b * b + 2.0) - b) / 2.0; }

Numerology Numerology::from_kappa(double kappa) {
  require(std::isfinite(kappa) && kappa > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
  double a = std::sqrt(2.0 / kappa);
  double b = std::sqrt(kappa / 8.0) - a;
  return fill(kappa, a, b);
}

Numerology Numerology::from_b(double b) {
  require(std::isfinite(b), ErrorKind::InvalidArgument, "b must be finite");
  double a = a_of_b(b);
  return fill(2.0 / (a * a), a, b);
}

}  // namespace cftlab
