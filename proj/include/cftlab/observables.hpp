#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cftlab/halfplane.hpp"
#include "cftlab/sle.hpp"

namespace cftlab {

// Probability that z = e^{i theta} lies left of the SLE trace.
double schramm_left_passage(double kappa, double theta);

// Probability that the trace hits [x - eps, x], u = eps / x.
double cardy_boundary_hit(double kappa, double u);

struct TriangleProbabilities {
  double equal = 0.0;  // P(tau_z = tau_eta)
  double later = 0.0;  // P(tau_z > tau_eta)
  cplx n_z;            // triangle coordinate of z
  cplx n_eta;          // triangle coordinate of eta
};

// Schwarz-Christoffel coordinate with N(0) = 0, N(inf) = 1; eta < 0.
TriangleProbabilities cardy_triangle(double kappa, const HalfPlanePoint& z, double eta);
// Unnormalized integral of zeta^{-4/k} (zeta - eta)^{8/k - 2} from 0 to z.
cplx cardy_triangle_integral(double kappa, const HalfPlanePoint& z, double eta);

double beffara_1pt(double kappa, cplx z);

enum class FormKind { Differential, SchwarzianForm, PrePreSchwarzian, Bilocal };
std::string to_string(FormKind k);

// A martingale-observable in (H, 0, inf). Differentials transform as
// (w')^lambda (conj w')^lambdaStar M(w); Schwarzian forms add mu S_w;
// pre-pre-Schwarzian forms add mu arg w'.
struct ObservableSpec {
  std::string id;
  double kappa = 0.0;
  FormKind kind = FormKind::Differential;
  double lambda = 0.0;
  double lambda_star = 0.0;
  double lambda_q = 0.0;
  double mu = 0.0;
  std::size_t arity = 1;
  // charges (sigma, sigmaStar) of the rooted vertex that generates M, if any
  bool from_vertex = false;
  double sigma = 0.0, sigma_star = 0.0;
  std::function<cplx(std::span<const cplx>)> m;
};

std::vector<std::string> catalogue_ids();
ObservableSpec catalogue(const std::string& id, double kappa);

// M_t evaluated from the flow of its points.
cplx flow_value(const ObservableSpec& spec, std::span<const FlowState> states);
// Same observable with lambda shifted (negative controls).
ObservableSpec with_lambda_shift(ObservableSpec spec, double shift);

// E[T(x_1) ... T(x_n)] with the boundary-condition change, by the recursion
// in the first point; exact rational bookkeeping in the x variables.
double fw_recursion(double kappa, std::span<const double> xs);

enum class ScreeningArc { EtaOneToQ, EtaTwoToQ, EtaOneToEtaTwo };

struct ScreeningExponents {
  double eta1, eta2, origin, infinity;
};

ScreeningExponents screening_exponents(double kappa, double sigma1, double sigma2, double s);

// Integral of the screened vertex correlator along a boundary arc; boundary
// values of powers are taken from the upper half-plane (arg = pi on x < 0).
cplx screening_observable(double kappa, double sigma1, double sigma2, double s, ScreeningArc arc, double eta1,
                          double eta2);

}  // namespace cftlab
