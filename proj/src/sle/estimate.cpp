#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "cftlab/error.hpp"
#include "cftlab/halfplane.hpp"
#include "cftlab/sle.hpp"

namespace cftlab {

namespace {

constexpr std::uint64_t kBlock = 256;

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

struct BlockState {
  std::vector<Welford> acc;
  std::vector<std::uint64_t> undecided;
  std::uint64_t failures = 0;
};

}  // namespace

std::vector<EstimateReport> estimate(const PathFunctional& f, std::size_t components, std::uint64_t n_paths,
                                     std::uint64_t seed_base, unsigned workers) {
  require(n_paths >= 1, ErrorKind::InvalidArgument, "estimate: nPaths must be >= 1");
  const std::uint64_t n_blocks = (n_paths + kBlock - 1) / kBlock;
  std::vector<BlockState> blocks(n_blocks);
  std::atomic<std::uint64_t> next{0};

  auto work = [&] {
    for (std::uint64_t b = next++; b < n_blocks; b = next++) {
      BlockState& st = blocks[b];
      st.acc.assign(components, {});
      st.undecided.assign(components, 0);
      const std::uint64_t end = std::min(n_paths, (b + 1) * kBlock);
      for (std::uint64_t k = b * kBlock; k < end; ++k) {
        std::vector<std::optional<double>> v;
        try {
          v = f(seed_base + k);
        } catch (const Error&) {
          ++st.failures;
          continue;
        }
        for (std::size_t c = 0; c < components; ++c) {
          if (c < v.size() && v[c])
            st.acc[c].add(*v[c]);
          else
            ++st.undecided[c];
        }
      }
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }

  std::vector<Welford> total(components);
  std::vector<EstimateReport> out(components);
  std::uint64_t failures = 0;
  for (const auto& st : blocks) {
    failures += st.failures;
    for (std::size_t c = 0; c < components; ++c) {
      total[c].merge(st.acc[c]);
      out[c].undecided += st.undecided[c];
    }
  }
  for (std::size_t c = 0; c < components; ++c) {
    out[c].mean = total[c].mean;
    out[c].n = total[c].n;
    out[c].stderr_ = total[c].n > 1
                         ? std::sqrt(total[c].m2 / static_cast<double>(total[c].n - 1)) /
                               std::sqrt(static_cast<double>(total[c].n))
                         : 0.0;
    out[c].failures = failures;
    out[c].seed_base = seed_base;
  }
  return out;
}

double DriftReport::worst() const { return std::max(std::abs(drift_re), std::abs(drift_im)); }

namespace {

double normalized(double mean, double initial, double se) {
  const double d = mean - initial;
  if (se > 0.0) return d / se;
  return std::abs(d) <= 1e-12 * std::max(1.0, std::abs(initial)) ? 0.0 : std::numeric_limits<double>::infinity();
}

FlowState state_of(const FlowTracker& f) { return {f.z0, f.w, f.log_dw, f.schwarzian, f.swallowed}; }

}  // namespace

std::vector<DriftReport> martingale_drift(const SimOptions& opts, const FlowFunctional& m,
                                          const std::vector<std::vector<HalfPlanePoint>>& tuples, double horizon,
                                          std::uint64_t n_paths, std::uint64_t seed_base) {
  require(horizon > 0.0, ErrorKind::InvalidArgument, "martingale_drift: horizon must be positive");
  std::vector<DriftReport> reports(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    std::vector<FlowState> init;
    for (const auto& p : tuples[i]) init.push_back(state_of(FlowTracker::at(p)));
    reports[i].points = tuples[i];
    reports[i].initial = m(init);
  }

  // touched by worker threads; only read for the report after they joined
  std::vector<std::atomic<std::uint64_t>> stops(tuples.size());
  auto path = [&](std::uint64_t seed) {
    std::vector<std::uint64_t> n_stopped(tuples.size(), 0);
    std::vector<std::vector<FlowTracker>> tr(tuples.size());
    for (std::size_t i = 0; i < tuples.size(); ++i)
      for (const auto& p : tuples[i]) tr[i].push_back(FlowTracker::at(p));
    std::vector<bool> stopped(tuples.size(), false);
    std::vector<std::optional<double>> v(2 * tuples.size());
    auto record = [&](std::size_t i) {
      std::vector<FlowState> st;
      for (const auto& f : tr[i]) st.push_back(state_of(f));
      const cplx val = m(st);
      if (std::isfinite(val.real()) && std::isfinite(val.imag())) {
        v[2 * i] = val.real();
        v[2 * i + 1] = val.imag();
      }
    };
    AdaptiveDriver drv(opts, seed);
    auto min_w2 = [&] {
      double mw = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < tr.size(); ++i)
        if (!stopped[i])
          for (const auto& f : tr[i]) mw = std::min(mw, std::norm(f.w));
      return mw;
    };
    auto apply = [&](double h, double pre, double post) {
      for (std::size_t i = 0; i < tr.size(); ++i) {
        if (stopped[i]) continue;
        bool out = false;
        for (auto& f : tr[i]) {
          const double before = f.w.real();
          f.advance(h, pre, post);
          const double floor2 = opts.resolve * opts.resolve * (drv.time() + std::norm(f.z0));
          out = out || (f.boundary ? f.w.real() * before <= 0.0 : f.w.imag() <= opts.resolve * std::abs(f.w)) ||
                std::norm(f.w) <= floor2;
        }
        if (out) {
          stopped[i] = true;
          ++n_stopped[i];
          record(i);
        }
      }
    };
    while (drv.time() < horizon && std::isfinite(min_w2()))
      drv.step(drv.step_for(min_w2(), horizon - drv.time()), min_w2, apply);
    for (std::size_t i = 0; i < tuples.size(); ++i)
      if (!stopped[i]) record(i);
    for (std::size_t i = 0; i < tuples.size(); ++i) stops[i] += n_stopped[i];
    return v;
  };

  const auto est = estimate(path, 2 * tuples.size(), n_paths, seed_base, opts.workers);
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    auto& r = reports[i];
    const auto& re = est[2 * i];
    const auto& im = est[2 * i + 1];
    r.mean = {re.mean, im.mean};
    r.stderr_re = re.stderr_;
    r.stderr_im = im.stderr_;
    r.drift_re = normalized(re.mean, r.initial.real(), re.stderr_);
    r.drift_im = normalized(im.mean, r.initial.imag(), im.stderr_);
    r.stopped = stops[i];
    r.dropped = re.undecided + re.failures;
  }
  return reports;
}

HadamardReport hadamard_check(double kappa, cplx z1, cplx z2, double horizon, double dt, std::uint64_t n_paths,
                              std::uint64_t seed_base) {
  require(z1.imag() > 0.0 && z2.imag() > 0.0 && z1 != z2, ErrorKind::InvalidArgument,
          "hadamard_check: need distinct interior points");
  auto rate = [](cplx a, cplx b) { return -4.0 * std::imag(1.0 / a) * std::imag(1.0 / b); };
  auto g = [](cplx a, cplx b) { return green(HalfPlanePoint::interior(a), HalfPlanePoint::interior(b)); };
  HadamardReport rep;
  double sum_err = 0.0, sum_slope = 0.0;
  for (std::uint64_t k = 0; k < n_paths; ++k) {
    const DrivingPath path = sample_driving(kappa, horizon, dt, seed_base + k);
    cplx w1 = z1, w2 = z2;
    for (int s = 0; s < path.steps; ++s) {
      if (w1.imag() <= 1e-6 || w2.imag() <= 1e-6) break;
      cplx s1 = std::sqrt(w1 * w1 + 4.0 * dt), s2 = std::sqrt(w2 * w2 + 4.0 * dt);
      if (s1.imag() < 0.0) s1 = -s1;
      if (s2.imag() < 0.0) s2 = -s2;
      // the recentering shift leaves G unchanged; the rate is read on the frozen step
      const double slope = (g(s1, s2) - g(w1, w2)) / dt;
      const double expected = 0.5 * (rate(w1, w2) + rate(s1, s2));
      const double err = std::abs(slope - expected);
      sum_err += err;
      sum_slope += std::abs(expected);
      rep.max_abs_error = std::max(rep.max_abs_error, err);
      ++rep.samples;
      const double dxi = path.values[s + 1] - path.values[s];
      w1 = s1 - dxi;
      w2 = s2 - dxi;
    }
  }
  if (rep.samples > 0) {
    rep.mean_abs_error = sum_err / static_cast<double>(rep.samples);
    rep.mean_abs_slope = sum_slope / static_cast<double>(rep.samples);
  }
  return rep;
}

}  // namespace cftlab
