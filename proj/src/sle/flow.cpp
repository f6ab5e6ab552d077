#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cftlab/error.hpp"
#include "cftlab/sle.hpp"

namespace cftlab {

DrivingPath sample_driving(double kappa, double T, double dt, std::uint64_t seed) {
  require(kappa >= 0.0 && std::isfinite(kappa), ErrorKind::InvalidArgument, "sample_driving: kappa must be >= 0");
  require(T > 0.0 && dt > 0.0 && dt <= T, ErrorKind::InvalidArgument, "sample_driving: need T > 0 and dt in (0, T]");
  DrivingPath p;
  p.kappa = kappa;
  p.dt = dt;
  p.seed = seed;
  p.steps = static_cast<int>(std::ceil(T / dt - 1e-9));
  p.values.resize(p.steps + 1);
  p.values[0] = 0.0;
  NormalStream rng(seed);
  const double scale = std::sqrt(kappa * dt);
  for (int k = 0; k < p.steps; ++k) p.values[k + 1] = p.values[k] + scale * rng.next();
  return p;
}

FlowTracker FlowTracker::interior(cplx z) {
  require(z.imag() > 0.0, ErrorKind::InvalidArgument, "flow: interior point needs Im z > 0");
  FlowTracker f;
  f.z0 = z;
  f.w = z;
  return f;
}

FlowTracker FlowTracker::real(double x) {
  require(x != 0.0, ErrorKind::InvalidArgument, "flow: boundary point must differ from 0");
  FlowTracker f;
  f.z0 = x;
  f.w = x;
  f.boundary = true;
  return f;
}

FlowTracker FlowTracker::at(const HalfPlanePoint& p) {
  return p.on_boundary() ? real(p.x()) : interior(p.value());
}

void FlowTracker::advance(double h, double dxi) {
  const double c = 4.0 * h;
  cplx s;
  if (boundary) {
    const double x = w.real();
    s = std::copysign(std::sqrt(x * x + c), x);
  } else {
    s = std::sqrt(w * w + c);
    if (s.imag() < 0.0) s = -s;
  }
  // S_phi for phi(w) = sqrt(w^2 + c), composed by the chain rule
  const cplx s2 = s * s;
  const cplx s_phi = -3.0 * c / (s2 * s2) * (1.0 + c / (2.0 * w * w));
  schwarzian += s_phi * std::exp(2.0 * log_dw);
  log_dw += std::log(w / s);
  w = s - dxi;
}

void FlowTracker::advance(double h, double pre, double post) {
  w -= pre;
  advance(h, post);
}

cplx FlowTracker::derivative() const { return std::exp(log_dw); }

namespace {

bool crossed(const FlowTracker& f, double before, double eps) {
  if (f.boundary) return f.w.real() * before <= 0.0 || std::abs(f.w.real()) < eps;
  return std::abs(f.w) < eps;
}

}  // namespace

Trajectory flow_point(const DrivingPath& path, const HalfPlanePoint& z, double eps_swallow) {
  require(z.value() != cplx(0.0), ErrorKind::InvalidArgument, "flow_point: z must differ from 0");
  Trajectory tr;
  tr.final = FlowTracker::at(z);
  FlowTracker& f = tr.final;
  tr.w.push_back(f.w);
  const double dt = path.dt;
  for (int k = 0; k < path.steps && !f.swallowed; ++k) {
    const double dxi = path.values[k + 1] - path.values[k];
    const int pieces = std::norm(f.w) < 8.0 * dt ? 16 : 1;
    if (pieces > 1) tr.refined = true;
    for (int p = 0; p < pieces; ++p) {
      const double before = f.w.real();
      f.advance(dt / pieces, dxi / pieces);
      if (crossed(f, before, eps_swallow)) {
        f.swallowed = true;
        f.tau = k * dt + (p + 1) * dt / pieces;
        break;
      }
    }
    tr.w.push_back(f.w);
  }
  return tr;
}

std::string to_string(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Undecided: break;
  }
  return "undecided";
}

Side left_passage(const DrivingPath& path, cplx z, double escape) {
  require(path.kappa <= 8.0, ErrorKind::InvalidArgument, "left_passage: kappa must be <= 8");
  require(z.imag() > 0.0, ErrorKind::InvalidArgument, "left_passage: z must be interior");
  FlowTracker f = FlowTracker::interior(z);
  const double radius = escape * std::abs(z);
  const double dt = path.dt;
  for (int k = 0; k < path.steps; ++k) {
    const double dxi = path.values[k + 1] - path.values[k];
    const int pieces = std::norm(f.w) < 8.0 * dt ? 16 : 1;
    for (int p = 0; p < pieces; ++p) {
      f.advance(dt / pieces, dxi / pieces);
      if (std::abs(f.w) < 1e-3) return f.w.real() < 0.0 ? Side::Left : Side::Right;
    }
    if (std::abs(f.w) >= radius) return f.w.real() < 0.0 ? Side::Left : Side::Right;
  }
  return Side::Undecided;
}

bool boundary_hit(const DrivingPath& path, double x, double eps) {
  require(path.kappa > 4.0 && path.kappa < 8.0, ErrorKind::InvalidArgument, "boundary_hit: need 4 < kappa < 8");
  require(x > 0.0 && eps > 0.0 && eps < x, ErrorKind::InvalidArgument, "boundary_hit: need 0 < eps < x");
  FlowTracker near = FlowTracker::real(x - eps);
  FlowTracker far = FlowTracker::real(x);
  const double dt = path.dt;
  for (int k = 0; k < path.steps; ++k) {
    const double dxi = path.values[k + 1] - path.values[k];
    const int pieces = near.w.real() * near.w.real() < 8.0 * dt ? 16 : 1;
    for (int p = 0; p < pieces; ++p) {
      const double nb = near.w.real(), fb = far.w.real();
      near.advance(dt / pieces, dxi / pieces);
      far.advance(dt / pieces, dxi / pieces);
      const bool n_out = crossed(near, nb, 1e-3);
      const bool f_out = crossed(far, fb, 1e-3);
      if (f_out) return false;
      if (n_out) return true;
    }
  }
  fail(ErrorKind::HorizonExhausted, "boundary_hit: points not swallowed within the path");
}

AdaptiveDriver::AdaptiveDriver(const SimOptions& opts, std::uint64_t seed)
    : kappa_(opts.kappa), dt_(opts.dt), ratio_(opts.step_ratio), split2_(opts.split * opts.split), rng_(seed) {
  require(opts.kappa >= 0.0 && opts.dt > 0.0 && opts.step_ratio > 0.0, ErrorKind::InvalidArgument,
          "sle: invalid simulation options");
}

double AdaptiveDriver::step_for(double min_w2, double remaining) const {
  const double target = ratio_ * min_w2;
  double h = dt_;
  if (target >= dt_) {
    for (int j = 0; j < 400 && 2.0 * h <= target; ++j) h *= 2.0;
  } else {
    for (int j = 0; j < 400 && h > target; ++j) h *= 0.5;
  }
  return std::min(h, remaining);
}

double AdaptiveDriver::increment(double h) { return std::sqrt(kappa_ * h) * rng_.next(); }

namespace {

// sqrt(w^2 + 4h) on the branch with nonnegative imaginary part
cplx slit(cplx w, double h) {
  const double a = (w.real() - w.imag()) * (w.real() + w.imag()) + 4.0 * h;
  const double b = 2.0 * w.real() * w.imag();
  const double r = std::sqrt(a * a + b * b);
  if (a >= 0.0) {
    const double re = std::sqrt(0.5 * (r + a));
    const double im = b / (2.0 * re);
    return im < 0.0 ? cplx(-re, -im) : cplx(re, im);
  }
  const double im = std::sqrt(0.5 * (r - a));
  return {b / (2.0 * im), im};
}

double slit(double x, double h) { return std::copysign(std::sqrt(x * x + 4.0 * h), x); }

// Two real points on one side of the driver: `far` and near = far - side * gap.
// The gap is carried multiplicatively so that it keeps full relative precision.
struct RealPair {
  double far;
  double gap;
  double side;

  double near() const { return far - side * gap; }
  void step(double h, double pre, double post) {
    far -= pre;
    const double n = near();
    const double fs = slit(far, h), ns = slit(n, h);
    gap *= (std::abs(far) + std::abs(n)) / (std::abs(fs) + std::abs(ns));
    far = fs - post;
  }
};

enum class PairEvent { None, NearFirst, Together };

bool essentially_real(cplx w, double resolve) {
  return w.imag() <= 0.0 || w.imag() * w.imag() <= resolve * resolve * std::norm(w);
}

// |w|^2 against the squared size sqrt(t + s0^2) of the hull seen from a point at
// distance s0; points enclosed together shrink without ever looking real
bool vanished(double norm_w, double t, double s02, double resolve) { return norm_w <= resolve * resolve * (t + s02); }

PairEvent pair_event(const RealPair& p, double resolve) {
  const double n = p.near();
  if (p.side * p.far <= 0.0) return PairEvent::Together;
  if (p.gap <= resolve * std::abs(p.far)) return PairEvent::Together;
  if (p.side * n <= 0.0 || std::abs(n) <= resolve * std::abs(p.far)) return PairEvent::NearFirst;
  return PairEvent::None;
}

}  // namespace

std::vector<Side> sample_left_passage(const SimOptions& opts, std::span<const cplx> zs, std::uint64_t seed) {
  require(opts.kappa <= 8.0, ErrorKind::InvalidArgument, "left_passage: kappa must be <= 8");
  const std::size_t n = zs.size();
  std::vector<cplx> w(zs.begin(), zs.end());
  std::vector<Side> out(n, Side::Undecided);
  std::vector<double> radius(n);
  double scale2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require(zs[i].imag() > 0.0, ErrorKind::InvalidArgument, "left_passage: z must be interior");
    radius[i] = opts.escape * std::abs(zs[i]);
    scale2 = std::max(scale2, std::norm(zs[i]));
  }
  // escape decides only while points are never swallowed; beyond kappa = 4 the
  // side is read off once the point reaches the boundary
  const bool use_escape = opts.kappa <= 4.0;
  const double horizon = opts.horizon_factor * scale2;
  AdaptiveDriver drv(opts, seed);
  std::size_t open = n;
  while (open > 0 && drv.time() < horizon) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (out[i] == Side::Undecided) m = std::min(m, std::norm(w[i]));
    auto min_w2 = [&] {
      double v = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i)
        if (out[i] == Side::Undecided) v = std::min(v, std::norm(w[i]));
      return v;
    };
    drv.step(drv.step_for(m, horizon - drv.time()), min_w2, [&](double h, double pre, double post) {
      for (std::size_t i = 0; i < n; ++i) {
        if (out[i] != Side::Undecided) continue;
        w[i] = slit(w[i] - pre, h) - post;
        const bool decided = essentially_real(w[i], opts.resolve) ||
                             vanished(std::norm(w[i]), drv.time(), std::norm(zs[i]), opts.resolve) ||
                             (use_escape && std::norm(w[i]) >= radius[i] * radius[i]);
        if (decided) {
          out[i] = w[i].real() < 0.0 ? Side::Left : Side::Right;
          --open;
        }
      }
    });
  }
  return out;
}

std::vector<std::optional<bool>> sample_boundary_hit(const SimOptions& opts, double x, std::span<const double> eps,
                                                     std::uint64_t seed) {
  require(opts.kappa > 4.0 && opts.kappa < 8.0, ErrorKind::InvalidArgument, "boundary_hit: need 4 < kappa < 8");
  require(x > 0.0, ErrorKind::InvalidArgument, "boundary_hit: x must be positive");
  std::vector<RealPair> pairs;
  for (double e : eps) {
    require(e > 0.0 && e < x, ErrorKind::InvalidArgument, "boundary_hit: need 0 < eps < x");
    pairs.push_back({x, e, 1.0});
  }
  std::vector<std::optional<bool>> out(eps.size());
  const double horizon = opts.horizon_factor * x * x;
  AdaptiveDriver drv(opts, seed);
  std::size_t open = eps.size();
  auto min_w2 = [&] {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (!out[i]) m = std::min(m, pairs[i].near() * pairs[i].near());
    return m;
  };
  while (open > 0 && drv.time() < horizon) {
    drv.step(drv.step_for(min_w2(), horizon - drv.time()), min_w2, [&](double h, double pre, double post) {
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (out[i]) continue;
        pairs[i].step(h, pre, post);
        const auto ev = pair_event(pairs[i], opts.resolve);
        if (ev == PairEvent::None) continue;
        out[i] = ev == PairEvent::NearFirst;
        --open;
      }
    });
  }
  return out;
}

SwallowOrder sample_swallow_order(const SimOptions& opts, cplx z, double eta, std::uint64_t seed) {
  require(opts.kappa > 4.0 && opts.kappa < 8.0, ErrorKind::InvalidArgument, "swallow order: need 4 < kappa < 8");
  require(z.imag() > 0.0 && eta < 0.0, ErrorKind::InvalidArgument, "swallow order: need interior z and eta < 0");
  const double s02 = std::max(std::norm(z), eta * eta);
  const double horizon = opts.horizon_factor * s02;
  const double r = opts.resolve;
  AdaptiveDriver drv(opts, seed);

  // z interior -> z real on the far side of the driver -> z and eta as a pair
  enum class Phase { Interior, Opposite, Pair } phase = Phase::Interior;
  std::optional<SwallowOrder> result;
  cplx wz = z;
  double we = eta, wr = 0.0;
  RealPair pair{0.0, 0.0, -1.0};
  bool z_near = false;

  auto min_w2 = [&] {
    if (result) return std::numeric_limits<double>::infinity();
    switch (phase) {
      case Phase::Interior: return std::min(std::norm(wz), we * we);
      case Phase::Opposite: return std::min(wr * wr, we * we);
      case Phase::Pair: break;
    }
    return pair.near() * pair.near();
  };
  auto apply = [&](double h, double pre, double post) {
    if (result) return;
    switch (phase) {
      case Phase::Interior: {
        const double before = we;
        wz = slit(wz - pre, h) - post;
        we = slit(we - pre, h) - post;
        const double t = drv.time();
        if (we * before <= 0.0 || std::abs(we) <= r * std::abs(wz)) {
          result = SwallowOrder::After;
        } else if (vanished(std::norm(wz), t, s02, r) && vanished(we * we, t, s02, r)) {
          result = SwallowOrder::Same;
        } else if (std::abs(wz) <= r * std::abs(we)) {
          result = SwallowOrder::Before;
        } else if (essentially_real(wz, r)) {
          const double u = wz.real();
          if (u > 0.0) {
            phase = Phase::Opposite;
            wr = u;
          } else {
            phase = Phase::Pair;
            z_near = u > we;
            pair = {z_near ? we : u, std::abs(u - we), -1.0};
          }
        }
        return;
      }
      case Phase::Opposite: {
        const double ab = wr, bb = we;
        wr = slit(wr - pre, h) - post;
        we = slit(we - pre, h) - post;
        const double t = drv.time();
        const bool both = vanished(wr * wr, t, s02, r) && vanished(we * we, t, s02, r);
        const bool z_out = both || wr * ab <= 0.0 || std::abs(wr) <= r * std::abs(we);
        const bool e_out = both || we * bb <= 0.0 || std::abs(we) <= r * std::abs(wr);
        if (z_out && e_out)
          result = SwallowOrder::Same;
        else if (z_out)
          result = SwallowOrder::Before;
        else if (e_out)
          result = SwallowOrder::After;
        return;
      }
      case Phase::Pair: {
        pair.step(h, pre, post);
        const auto ev = pair_event(pair, r);
        if (ev == PairEvent::Together)
          result = SwallowOrder::Same;
        else if (ev == PairEvent::NearFirst)
          result = z_near ? SwallowOrder::Before : SwallowOrder::After;
        return;
      }
    }
  };
  while (!result && drv.time() < horizon) drv.step(drv.step_for(min_w2(), horizon - drv.time()), min_w2, apply);
  return result.value_or(SwallowOrder::Undecided);
}

}  // namespace cftlab
