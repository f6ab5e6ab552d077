#pragma once

#include <json.hpp>
#include <vector>

#include "cftlab/numerology.hpp"
#include "cftlab/wick.hpp"

namespace cftlab {

struct VertexNode {
  double sigma = 0.0;
  double sigma_star = 0.0;
  HalfPlanePoint point = HalfPlanePoint::interior({0.0, 1.0});
};

struct VertexDims {
  double lambda, lambda_star, spin;
};

VertexDims vertex_dims(double sigma, double sigma_star, double b);

// Star product of rooted vertices O^{(sigma, sigmaStar)}; with insertion the
// boundary-condition change at 0 contributes z^{sigma a} zbar^{sigmaStar a}.
struct StarProduct {
  std::vector<VertexNode> nodes;
  bool insertion = false;
  double kappa = 4.0;

  double total_charge() const;  // Sigma
  double lambda_q() const;      // (a - b) Sigma + Sigma^2 / 2
};

cplx star_correlator(const StarProduct& sp);

// Value with analytic first and second derivatives in the variables
// (z_0, zbar_0, z_1, zbar_1, ...), accumulated from logarithmic derivatives.
struct StarJet {
  cplx value;
  std::vector<cplx> grad;     // size 2n
  std::vector<cplx> hessian;  // 2n x 2n, row major
};

StarJet star_jet(const StarProduct& sp);

ChargeNode charge_of(const VertexNode& v);
// The same expectation posed to the Wick engine.
CorrelationQuery engine_query(const StarProduct& sp);

struct ResidualResult {
  cplx lhs, rhs;
  double residual;
};

// (1/2a^2)(sum_j d_j + dbar_j)^2 E = L_{v0} E for the inserted star product
ResidualResult cardy_residual(const StarProduct& sp);

// d_{z_j} E[X] against the current-primary bracket, X = prod V^{i sigma_j}
ResidualResult kz_residual(const std::vector<VertexNode>& nodes, std::size_t j);

struct WardEntry {
  FieldExpr field;
  double lambda = 0.0;
  double lambda_star = 0.0;
  HalfPlanePoint point = HalfPlanePoint::interior({0.0, 1.0});
};

// E[T(zeta) X] against the Ward sum over the differentials of the string.
ResidualResult ward_residual(const std::vector<WardEntry>& string, const Background& background, cplx zeta);

StarProduct parse_star_product(const nlohmann::json& j);

}  // namespace cftlab
