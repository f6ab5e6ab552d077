#include <cmath>
#include <numbers>

#include "cftlab/error.hpp"
#include "cftlab/numerology.hpp"
#include "cftlab/observables.hpp"
#include "cftlab/vertex.hpp"

namespace cftlab {

std::string to_string(FormKind k) {
  switch (k) {
    case FormKind::Differential: return "differential";
    case FormKind::SchwarzianForm: return "schwarzian-form";
    case FormKind::PrePreSchwarzian: return "pre-pre-schwarzian";
    case FormKind::Bilocal: return "bilocal";
  }
  return "?";
}

std::vector<std::string> catalogue_ids() {
  return {"wedge", "strip", "halfplane-deriv", "schramm-sheffield-1pt", "hatT-1pt", "beffara", "bosonic-2pt"};
}

namespace {

// Differential generated by the rooted vertex (sigma, sigmaStar) at z and the
// insertion at 0.
ObservableSpec vertex_observable(std::string id, double kappa, double sigma, double sigma_star) {
  const Numerology n = Numerology::from_kappa(kappa);
  const VertexDims d = vertex_dims(sigma, sigma_star, n.b);
  StarProduct sp{{{sigma, sigma_star, HalfPlanePoint::interior({0.0, 1.0})}}, true, kappa};
  ObservableSpec s;
  s.id = std::move(id);
  s.kappa = kappa;
  s.kind = FormKind::Differential;
  s.lambda = d.lambda;
  s.lambda_star = d.lambda_star;
  s.lambda_q = sp.lambda_q();
  s.from_vertex = true;
  s.sigma = sigma;
  s.sigma_star = sigma_star;
  s.m = [sp](std::span<const cplx> w) {
    StarProduct at = sp;
    at.nodes[0].point = HalfPlanePoint::interior(w[0]);
    return star_correlator(at);
  };
  return s;
}

// 2a arg w + mu arg w', the one-point function of the shifted field
double bosonic_mean(double a, double mu, const FlowState& st) { return 2.0 * a * std::arg(st.w) + mu * st.log_dw.imag(); }

}  // namespace

ObservableSpec catalogue(const std::string& id, double kappa) {
  require(kappa > 0.0, ErrorKind::InvalidArgument, "catalogue: kappa must be positive");
  const Numerology n = Numerology::from_kappa(kappa);
  const double a = n.a, b = n.b;
  if (id == "wedge") return vertex_observable(id, kappa, 2.0 * b, 0.0);
  if (id == "strip") return vertex_observable(id, kappa, 2.0 * b - 2.0 * a, 0.0);
  if (id == "halfplane-deriv") return vertex_observable(id, kappa, 2.0 * b - a, 0.0);
  if (id == "beffara") {
    ObservableSpec s = vertex_observable(id, kappa, b - a, b - a);
    s.m = [kappa](std::span<const cplx> w) { return cplx(beffara_1pt(kappa, w[0])); };
    return s;
  }
  ObservableSpec s;
  s.id = id;
  s.kappa = kappa;
  if (id == "schramm-sheffield-1pt") {
    s.kind = FormKind::PrePreSchwarzian;
    s.mu = -2.0 * b;
    s.m = [a](std::span<const cplx> w) { return cplx(2.0 * a * std::arg(w[0])); };
    return s;
  }
  if (id == "hatT-1pt") {
    s.kind = FormKind::SchwarzianForm;
    s.lambda = 2.0;
    s.mu = n.c / 12.0;
    const double h = n.h;
    s.m = [h](std::span<const cplx> w) { return h / (w[0] * w[0]); };
    return s;
  }
  if (id == "bosonic-2pt") {
    s.kind = FormKind::Bilocal;
    s.mu = -2.0 * b;
    s.arity = 2;
    s.m = [a](std::span<const cplx> w) {
      const auto p = HalfPlanePoint::interior(w[0]), q = HalfPlanePoint::interior(w[1]);
      return cplx(2.0 * green(p, q) + 4.0 * a * a * std::arg(w[0]) * std::arg(w[1]));
    };
    return s;
  }
  fail(ErrorKind::UnknownName, "catalogue: unknown observable '" + id + "'");
}

cplx flow_value(const ObservableSpec& spec, std::span<const FlowState> states) {
  require(states.size() == spec.arity, ErrorKind::InvalidArgument, "flow_value: wrong number of points");
  cplx weight = 1.0;
  for (const auto& st : states) weight *= std::exp(spec.lambda * st.log_dw + spec.lambda_star * std::conj(st.log_dw));
  const double a = Numerology::from_kappa(spec.kappa).a;
  switch (spec.kind) {
    case FormKind::Differential: {
      std::vector<cplx> w;
      for (const auto& st : states) w.push_back(st.w);
      return weight * spec.m(w);
    }
    case FormKind::SchwarzianForm: {
      const cplx w = states[0].w;
      return weight * spec.m({&w, 1}) + spec.mu * states[0].schwarzian;
    }
    case FormKind::PrePreSchwarzian:
      return weight * bosonic_mean(a, spec.mu, states[0]);
    case FormKind::Bilocal: {
      const auto p = HalfPlanePoint::interior(states[0].w), q = HalfPlanePoint::interior(states[1].w);
      return weight * (2.0 * green(p, q) + bosonic_mean(a, spec.mu, states[0]) * bosonic_mean(a, spec.mu, states[1]));
    }
  }
  return 0.0;
}

ObservableSpec with_lambda_shift(ObservableSpec spec, double shift) {
  spec.id += "+dlambda";
  spec.lambda += shift;
  if (spec.lambda_star != 0.0) spec.lambda_star += shift;
  return spec;
}

}  // namespace cftlab
