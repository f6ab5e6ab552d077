#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cftlab/halfplane.hpp"

namespace cftlab {

// Philox4x32-10 counter-based generator.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter ctr, Key key);
};

// Standard normals for one seed. Counter i of the stream yields the pair
// (r cos 2 pi u2, r sin 2 pi u2) with u1 = ((x >> 11) + 1) 2^-53,
// u2 = (y >> 11) 2^-53, r = sqrt(-2 log u1), x and y the two 64-bit halves
// (word0 | word1 << 32, word2 | word3 << 32) of block(i, seed).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed);
  double next();
  std::uint64_t draws() const { return draws_; }

 private:
  Philox4x32::Key key_;
  std::uint64_t counter_ = 0;
  std::uint64_t draws_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct DrivingPath {
  double kappa = 0.0;
  double dt = 0.0;
  int steps = 0;
  std::vector<double> values;  // xi_0 .. xi_steps
  std::uint64_t seed = 0;
};

DrivingPath sample_driving(double kappa, double T, double dt, std::uint64_t seed);

// Flow of one point under w_t = g_t - xi_t, with log w_t' and the Schwarzian
// S_{w_t} composed along the way.
struct FlowTracker {
  cplx z0;
  cplx w;
  bool boundary = false;
  cplx log_dw = 0.0;
  cplx schwarzian = 0.0;
  bool swallowed = false;
  std::optional<double> tau;

  static FlowTracker interior(cplx z);
  static FlowTracker real(double x);
  static FlowTracker at(const HalfPlanePoint& p);

  // One frozen-driver step of length h followed by the recentering shift dxi.
  void advance(double h, double dxi);
  // Shift by pre, frozen step, shift by post.
  void advance(double h, double pre, double post);
  cplx derivative() const;
};

struct Trajectory {
  std::vector<cplx> w;  // w at every grid time that was reached
  FlowTracker final;
  bool refined = false;  // some step fell below |w|^2 < 8 dt and was split
};

// Fixed-grid flow along a sampled path; steps with |w|^2 < 8 dt are split
// into 16 substeps with the driver interpolated linearly.
Trajectory flow_point(const DrivingPath& path, const HalfPlanePoint& z, double eps_swallow = 1e-3);

enum class Side { Left, Right, Undecided };
std::string to_string(Side s);

Side left_passage(const DrivingPath& path, cplx z, double escape = 50.0);
bool boundary_hit(const DrivingPath& path, double x, double eps);

// Settings of the adaptive Monte Carlo flow. Steps are dt * 2^j with the
// largest j such that the step stays below step_ratio * min |w|^2. Points
// with arg w or the relative gap of a real pair below resolve count as
// reaching the boundary (or merging).
struct SimOptions {
  double kappa = 8.0 / 3.0;
  double dt = 1e-3;
  double step_ratio = 0.005;
  double split = 1.0;
  double resolve = 1e-9;
  double escape = 50.0;
  double horizon_factor = 1e40;
  unsigned workers = 1;
};

// One driver realization with adaptive steps.
class AdaptiveDriver {
 public:
  AdaptiveDriver(const SimOptions& opts, std::uint64_t seed);
  double step_for(double min_w2, double remaining) const;
  double increment(double h);
  double time() const { return t_; }
  void advance_time(double h) { t_ += h; }

  // Advances by h. While an increment exceeds split * sqrt(min_w2()) it is
  // halved by sampling the Brownian bridge midpoint; apply(h, pre, post) then
  // runs on every piece in time order, pre + post being the driver increment
  // split at the middle of the piece.
  template <class MinW2, class Apply>
  void step(double h, const MinW2& min_w2, const Apply& apply) {
    piece(h, increment(h), 0, min_w2, apply);
  }

 private:
  template <class MinW2, class Apply>
  void piece(double h, double dxi, int depth, const MinW2& min_w2, const Apply& apply) {
    if (depth < 60 && dxi * dxi > split2_ * min_w2()) {
      const double mid = 0.5 * dxi + 0.5 * std::sqrt(kappa_ * h) * rng_.next();
      piece(0.5 * h, mid, depth + 1, min_w2, apply);
      piece(0.5 * h, dxi - mid, depth + 1, min_w2, apply);
      return;
    }
    // the driver is frozen at its value at the middle of the piece
    const double mid = 0.5 * dxi + 0.5 * std::sqrt(kappa_ * h) * rng_.next();
    apply(h, mid, dxi - mid);
    t_ += h;
  }

  double kappa_, dt_, ratio_, split2_;
  NormalStream rng_;
  double t_ = 0.0;
};

// Per-path samplers on adaptively refined drivers.
std::vector<Side> sample_left_passage(const SimOptions& opts, std::span<const cplx> zs, std::uint64_t seed);
// For each eps: did the path hit [x - eps, x]?
std::vector<std::optional<bool>> sample_boundary_hit(const SimOptions& opts, double x, std::span<const double> eps,
                                                     std::uint64_t seed);

enum class SwallowOrder { Before, Same, After, Undecided };  // tau_z relative to tau_eta
SwallowOrder sample_swallow_order(const SimOptions& opts, cplx z, double eta, std::uint64_t seed);

struct EstimateReport {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;
  std::uint64_t undecided = 0;
  std::uint64_t failures = 0;
  std::uint64_t seed_base = 0;
};

// Per-path functional: one optional value per component (nullopt = undecided).
using PathFunctional = std::function<std::vector<std::optional<double>>(std::uint64_t seed)>;

// Paths use seeds seedBase + k and are processed in blocks of 256; block
// Welford states are merged in block order, so results do not depend on the
// number of workers.
std::vector<EstimateReport> estimate(const PathFunctional& f, std::size_t components, std::uint64_t n_paths,
                                     std::uint64_t seed_base, unsigned workers = 1);

struct FlowState {
  cplx z;
  cplx w;
  cplx log_dw;
  cplx schwarzian;
  bool swallowed;
};

using FlowFunctional = std::function<cplx(std::span<const FlowState>)>;

struct DriftReport {
  std::vector<HalfPlanePoint> points;
  cplx initial;
  cplx mean;
  double stderr_re = 0.0, stderr_im = 0.0;
  double drift_re = 0.0, drift_im = 0.0;  // (mean - initial) / stderr per part
  std::uint64_t stopped = 0;  // paths on which the tuple reached the boundary
  std::uint64_t dropped = 0;  // non-finite values and failed paths
  double worst() const;
};

// Evolves every point tuple to time horizon on shared paths and reports the
// normalized drift of E[M_t] against M_0. A tuple with a point that reaches
// the boundary is stopped there and contributes M at that time.
std::vector<DriftReport> martingale_drift(const SimOptions& opts, const FlowFunctional& m,
                                          const std::vector<std::vector<HalfPlanePoint>>& tuples, double horizon,
                                          std::uint64_t n_paths, std::uint64_t seed_base);

struct HadamardReport {
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  double mean_abs_slope = 0.0;
  std::uint64_t samples = 0;
};

// Per-step finite-difference slope of G(w_t(z1), w_t(z2)) against
// -4 Im(1/w_1) Im(1/w_2), on fixed-step paths.
HadamardReport hadamard_check(double kappa, cplx z1, cplx z2, double horizon, double dt, std::uint64_t n_paths,
                              std::uint64_t seed_base);

}  // namespace cftlab
