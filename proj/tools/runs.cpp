#include "runs.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <cmath>
#include <memory>

#include "cftlab/observables.hpp"

namespace cftlab::tools {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateMap:
    case ErrorKind::HorizonExhausted:
      return kRuntimeError;
    default:
      return kInputError;
  }
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha256 failed");
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::optional<double> EstimateRow::z_score() const {
  if (!reference) return std::nullopt;
  const double diff = estimate.mean - *reference;
  if (estimate.stderr_ > 0.0) return diff / estimate.stderr_;
  return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
}

std::string estimate_csv(const std::vector<EstimateRow>& rows) {
  std::string out = "id,re,im,mean,stderr,n,undecided\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", r.id, num(r.point.real()), num(r.point.imag()), num(r.estimate.mean),
                       num(r.estimate.stderr_), r.estimate.n, r.estimate.undecided);
  return out;
}

nlohmann::json estimate_summary(const std::vector<EstimateRow>& rows) {
  nlohmann::json items = nlohmann::json::array();
  double worst = 0.0;
  for (const auto& r : rows) {
    nlohmann::json j{{"id", r.id},
                     {"point", {r.point.real(), r.point.imag()}},
                     {"mean", r.estimate.mean},
                     {"stderr", r.estimate.stderr_},
                     {"n", r.estimate.n},
                     {"undecided", r.estimate.undecided},
                     {"failures", r.estimate.failures}};
    if (auto z = r.z_score()) {
      j["reference"] = *r.reference;
      j["z"] = *z;
      worst = std::max(worst, std::abs(*z));
    }
    items.push_back(std::move(j));
  }
  return {{"rows", items}, {"maxAbsZ", worst}};
}

std::vector<EstimateRow> left_passage_rows(const SimOptions& opts, const std::vector<cplx>& points,
                                           std::uint64_t paths, std::uint64_t seed) {
  PathFunctional f = [&](std::uint64_t s) {
    const auto sides = sample_left_passage(opts, points, s);
    std::vector<std::optional<double>> v;
    for (Side side : sides)
      v.push_back(side == Side::Undecided ? std::nullopt : std::optional<double>(side == Side::Left ? 1.0 : 0.0));
    return v;
  };
  const auto est = estimate(f, points.size(), paths, seed, opts.workers);
  std::vector<EstimateRow> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    EstimateRow r{"left-passage", points[i], est[i], std::nullopt};
    if (std::abs(std::abs(points[i]) - 1.0) < 1e-12 && opts.kappa <= 8.0)
      r.reference = schramm_left_passage(opts.kappa, std::arg(points[i]));
    rows.push_back(r);
  }
  return rows;
}

std::vector<EstimateRow> boundary_hit_rows(const SimOptions& opts, double x, const std::vector<double>& us,
                                           std::uint64_t paths, std::uint64_t seed) {
  std::vector<double> eps;
  for (double u : us) eps.push_back(u * x);
  PathFunctional f = [&](std::uint64_t s) {
    const auto hits = sample_boundary_hit(opts, x, eps, s);
    std::vector<std::optional<double>> v;
    for (const auto& h : hits) v.push_back(h ? std::optional<double>(*h ? 1.0 : 0.0) : std::nullopt);
    return v;
  };
  const auto est = estimate(f, us.size(), paths, seed, opts.workers);
  std::vector<EstimateRow> rows;
  for (std::size_t i = 0; i < us.size(); ++i)
    rows.push_back({"boundary-hit", cplx(us[i], 0.0), est[i], cardy_boundary_hit(opts.kappa, us[i])});
  return rows;
}

std::vector<EstimateRow> swallow_order_rows(const SimOptions& opts, cplx z, double eta, std::uint64_t paths,
                                            std::uint64_t seed) {
  PathFunctional f = [&](std::uint64_t s) {
    const auto r = sample_swallow_order(opts, z, eta, s);
    if (r == SwallowOrder::Undecided) return std::vector<std::optional<double>>{std::nullopt, std::nullopt};
    return std::vector<std::optional<double>>{r == SwallowOrder::Same ? 1.0 : 0.0, r == SwallowOrder::After ? 1.0 : 0.0};
  };
  const auto est = estimate(f, 2, paths, seed, opts.workers);
  const auto tri = cardy_triangle(opts.kappa, HalfPlanePoint::interior(z), eta);
  return {{"swallow-same", z, est[0], tri.equal}, {"swallow-later", z, est[1], tri.later}};
}

std::vector<std::vector<cplx>> default_drift_probes(std::size_t arity) {
  if (arity == 2) return {{{-1.5, 1.5}, {1.5, 2.0}}};
  return {{{0.0, 2.0}}, {{2.0, 2.0}}, {{-1.5, 1.5}}};
}

double log_log_slope(const std::vector<double>& us, const std::vector<double>& ps) {
  require(us.size() == ps.size() && us.size() >= 2, ErrorKind::InvalidArgument, "fit: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(us.size());
  for (std::size_t i = 0; i < us.size(); ++i) {
    require(us[i] > 0.0 && ps[i] > 0.0, ErrorKind::InvalidArgument, "fit: values must be positive");
    const double x = std::log(us[i]), y = std::log(ps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cftlab::tools
