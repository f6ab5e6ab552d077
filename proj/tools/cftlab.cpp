#include <fmt/format.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "cftlab/numerology.hpp"
#include "cftlab/observables.hpp"
#include "cftlab/ope.hpp"
#include "cftlab/suites.hpp"
#include "cftlab/wick_json.hpp"
#include "json_config.hpp"
#include "runs.hpp"

using namespace cftlab;
using namespace cftlab::tools;
using nlohmann::json;

namespace {

struct Common {
  std::optional<double> kappa, b;
  std::uint64_t seed = 20240501;
  std::uint64_t paths = 10000;
  double dt = 1e-3;
  std::optional<double> horizon;
  std::optional<double> tolerance;
  std::string out;
  std::string manifest;
  std::string format = "json";
  unsigned workers = 1;
  double step_ratio = SimOptions{}.step_ratio;
  double resolve = SimOptions{}.resolve;
};

// Primary output of a command and its pass/fail verdict.
struct Outcome {
  std::string csv;
  json summary;
  int code = kPass;
};

// Input files read by a command, kept for the manifest hash.
struct Inputs {
  std::map<std::string, std::string> files;

  std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::InvalidArgument, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return files[path] = ss.str();
  }

  json read_json(const std::string& path) {
    const std::string text = read(path);
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::InvalidArgument, path + ": " + e.what());
    }
  }
};

double resolve_kappa(const Common& c) {
  if (c.kappa) return *c.kappa;
  if (c.b) return Numerology::from_b(*c.b).kappa;
  fail(ErrorKind::InvalidArgument, "need --kappa or --b");
}

SimOptions sim_options(const Common& c) {
  SimOptions o;
  o.kappa = resolve_kappa(c);
  o.dt = c.dt;
  o.workers = c.workers;
  o.step_ratio = c.step_ratio;
  o.resolve = c.resolve;
  if (c.horizon) o.horizon_factor = *c.horizon;
  return o;
}

// A point given as [re, im] or as a list of such for multi-point observables.
std::vector<cplx> tuple_of(const json& j) {
  if (j.is_array() && !j.empty() && j[0].is_array()) {
    std::vector<cplx> out;
    for (const auto& p : j) out.push_back(json_complex(p, "points"));
    return out;
  }
  return {json_complex(j, "points")};
}

std::vector<std::vector<cplx>> grid_points(const json& grid) {
  require(grid.is_object() && grid.contains("points") && grid.at("points").is_array(), ErrorKind::InvalidArgument,
          "grid: expected {\"points\": [[re, im], ...]}");
  std::vector<std::vector<cplx>> out;
  for (const auto& p : grid.at("points")) out.push_back(tuple_of(p));
  return out;
}

// Parses a query node by node so errors name the offending entry.
CorrelationQuery checked_query(const json& doc, const std::string& where) {
  require(doc.is_object() && doc.contains("nodes") && doc.at("nodes").is_array(), ErrorKind::InvalidArgument,
          where + ": expected an object with a nodes array");
  try {
    const Background bg = parse_background(doc.value("background", json()));
    const auto& nodes = doc.at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      try {
        parse_node(nodes[i], bg.b());
        parse_point(nodes[i]);
      } catch (const Error& e) {
        fail(e.kind(), fmt::format("{}: nodes[{}]: {}", where, i, e.what()));
      } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, fmt::format("{}: nodes[{}]: {}", where, i, e.what()));
      }
    }
    return parse_query(doc);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, where + ": " + e.what());
  }
}

std::string tuple_csv(const std::vector<cplx>& pts, std::size_t width) {
  std::string s;
  for (std::size_t i = 0; i < width; ++i) {
    if (i) s += ',';
    if (i < pts.size()) s += num(pts[i].real()) + ',' + num(pts[i].imag());
    else s += ',';
  }
  return s;
}

std::string point_header(std::size_t width) {
  std::string s = "re,im";
  for (std::size_t i = 2; i <= width; ++i) s += fmt::format(",re{},im{}", i, i);
  return s;
}

json tuple_json(const std::vector<cplx>& pts) {
  json j = json::array();
  for (cplx z : pts) j.push_back(complex_json(z));
  return j;
}

// ---- commands ----

Outcome cmd_correlate(const std::string& file, std::size_t field_cap, Inputs& inputs) {
  const CorrelationQuery q = checked_query(inputs.read_json(file), file);
  EngineOptions eo;
  eo.field_cap = field_cap;
  const auto start = std::chrono::steady_clock::now();
  const cplx value = correlate(q, eo);
  const std::size_t diagrams = enumerate_diagrams(q, eo).size();
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::cerr << fmt::format("timing: {:.3f} ms\n", ms);
  Outcome o;
  o.summary = {{"value", complex_json(value)}, {"diagrams", diagrams}, {"entries", q.entries.size()}};
  o.csv = fmt::format("re,im,diagrams\n{},{},{}\n", num(value.real()), num(value.imag()), diagrams);
  return o;
}

Outcome cmd_ope(const std::string& file, Inputs& inputs) {
  const json doc = inputs.read_json(file);
  try {
    require(doc.is_object() && doc.contains("x") && doc.contains("y") && doc.contains("point"),
            ErrorKind::InvalidArgument, file + ": expected x, y and point");
    const CorrelationQuery probe = doc.contains("probe") ? checked_query(doc.at("probe"), file + ": probe")
                                                         : CorrelationQuery{};
    const double b = probe.background.b();
    const FieldExpr x = parse_node(doc.at("x"), b), y = parse_node(doc.at("y"), b);
    const HalfPlanePoint z = HalfPlanePoint::interior(json_complex(doc.at("point"), "point"));
    ContourOptions co;
    co.samples = doc.value("samples", co.samples);
    co.radius_fraction = doc.value("radiusFraction", co.radius_fraction);
    const auto coeffs = ope_coefficients(x, y, z, probe, doc.value("nMin", -4), doc.value("nMax", 2), co);
    Outcome o;
    o.csv = "n,re,im\n";
    json rows = json::array();
    for (const auto& [n, c] : coeffs) {
      o.csv += fmt::format("{},{},{}\n", n, num(c.real()), num(c.imag()));
      rows.push_back({{"n", n}, {"value", complex_json(c)}});
    }
    o.summary = {{"coefficients", rows}};
    return o;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, file + ": " + e.what());
  }
}

bool case_matches(const json& in, const Common& c) {
  auto near = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); };
  if (!c.kappa && !c.b) return true;
  const double b = c.b ? *c.b : Numerology::from_kappa(*c.kappa).b;
  if (in.contains("kappa") && in.at("kappa").is_number()) {
    const double k = in.at("kappa").get<double>();
    return c.kappa ? near(k, *c.kappa) : near(Numerology::from_kappa(k).b, b);
  }
  if (in.contains("b") && in.at("b").is_number()) return near(in.at("b").get<double>(), b);
  return true;
}

Outcome cmd_verify(const std::string& name, const Common& c, int configurations) {
  const std::vector<std::string> names = name == "all" ? suite_names() : std::vector<std::string>{name};
  Outcome o;
  o.csv = "suite,case,residual,tolerance,negative_control,pass\n";
  json reports = json::array();
  bool all_pass = true;
  for (const auto& n : names) {
    SuiteReport full = run_suite(n, {c.seed, configurations});
    SuiteReport r{full.suite, {}};
    for (auto& k : full.cases) {
      if (!case_matches(k.inputs, c)) continue;
      if (c.tolerance && !k.expect_large) {
        k.tolerance = *c.tolerance;
        k.pass = k.residual < k.tolerance;
      }
      r.cases.push_back(k);
    }
    require(!r.cases.empty(), ErrorKind::InvalidArgument, "verify: suite '" + n + "' has no cases at these parameters");
    for (std::size_t i = 0; i < r.cases.size(); ++i) {
      const auto& k = r.cases[i];
      o.csv += fmt::format("{},{},{},{},{},{}\n", n, i, num(k.residual), num(k.tolerance), k.expect_large ? 1 : 0,
                           k.pass ? 1 : 0);
    }
    json j = r.to_json();
    j["pass"] = r.pass();
    j["worstResidual"] = r.worst_residual();
    reports.push_back(std::move(j));
    all_pass = all_pass && r.pass();
  }
  o.summary = {{"suites", reports}, {"pass", all_pass}};
  o.code = all_pass ? kPass : kToleranceFailure;
  return o;
}

struct EstimateArgs {
  std::string kind;
  std::string grid;
  std::vector<double> thetas;
  double x = 1.0;
  std::vector<double> us{0.25, 0.5, 0.75};
  std::vector<double> z{0.0, 1.0};
  double eta = -1.0;
};

Outcome cmd_sle_estimate(const EstimateArgs& a, const Common& c, Inputs& inputs) {
  const SimOptions opts = sim_options(c);
  std::vector<EstimateRow> rows;
  if (a.kind == "left-passage") {
    std::vector<cplx> pts;
    if (!a.grid.empty())
      for (const auto& t : grid_points(inputs.read_json(a.grid))) pts.insert(pts.end(), t.begin(), t.end());
    for (double th : a.thetas) pts.push_back(std::polar(1.0, th));
    if (pts.empty())
      for (double f : {1.0 / 3, 0.5, 2.0 / 3}) pts.push_back(std::polar(1.0, f * std::numbers::pi));
    rows = left_passage_rows(opts, pts, c.paths, c.seed);
  } else if (a.kind == "boundary-hit") {
    rows = boundary_hit_rows(opts, a.x, a.us, c.paths, c.seed);
  } else if (a.kind == "swallow-order") {
    require(a.z.size() == 2, ErrorKind::InvalidArgument, "--z takes re and im");
    rows = swallow_order_rows(opts, {a.z[0], a.z[1]}, a.eta, c.paths, c.seed);
  } else {
    fail(ErrorKind::UnknownName, "sle estimate: unknown estimator '" + a.kind + "'");
  }
  Outcome o;
  o.csv = estimate_csv(rows);
  o.summary = estimate_summary(rows);
  const double tol = c.tolerance.value_or(3.0);
  o.summary["tolerance"] = tol;
  o.code = o.summary["maxAbsZ"].get<double>() < tol ? kPass : kToleranceFailure;
  return o;
}

struct DriftArgs {
  std::string id;
  std::string grid;
  double lambda_shift = 0.0;
  bool expect_drift = false;
};

Outcome cmd_sle_drift(const DriftArgs& a, const Common& c, Inputs& inputs) {
  const SimOptions opts = sim_options(c);
  ObservableSpec spec = catalogue(a.id, opts.kappa);
  if (a.lambda_shift != 0.0) spec = with_lambda_shift(spec, a.lambda_shift);
  const auto probes = a.grid.empty() ? default_drift_probes(spec.arity) : grid_points(inputs.read_json(a.grid));
  std::vector<std::vector<HalfPlanePoint>> tuples;
  for (const auto& t : probes) {
    require(t.size() == spec.arity, ErrorKind::InvalidArgument,
            fmt::format("sle drift: '{}' takes {} point(s) per probe", a.id, spec.arity));
    std::vector<HalfPlanePoint> pts;
    for (cplx z : t) pts.push_back(HalfPlanePoint::interior(z));
    tuples.push_back(std::move(pts));
  }
  FlowFunctional m = [&](std::span<const FlowState> st) { return flow_value(spec, st); };
  const auto reports = martingale_drift(opts, m, tuples, c.horizon.value_or(0.5), c.paths, c.seed);
  Outcome o;
  o.csv = "id," + point_header(spec.arity) +
          ",initial_re,initial_im,mean_re,mean_im,stderr_re,stderr_im,drift_re,drift_im,stopped,dropped\n";
  json rows = json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    o.csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", spec.id, tuple_csv(probes[i], spec.arity),
                         num(r.initial.real()), num(r.initial.imag()), num(r.mean.real()), num(r.mean.imag()),
                         num(r.stderr_re), num(r.stderr_im), num(r.drift_re), num(r.drift_im), r.stopped, r.dropped);
    rows.push_back({{"points", tuple_json(probes[i])},
                    {"initial", complex_json(r.initial)},
                    {"mean", complex_json(r.mean)},
                    {"stderr", {r.stderr_re, r.stderr_im}},
                    {"drift", {r.drift_re, r.drift_im}},
                    {"stopped", r.stopped},
                    {"dropped", r.dropped}});
    worst = std::max(worst, r.worst());
  }
  const double tol = c.tolerance.value_or(3.0);
  o.summary = {{"id", spec.id}, {"kappa", opts.kappa}, {"rows", rows}, {"worstDrift", worst}, {"tolerance", tol}};
  o.code = (a.expect_drift ? worst > tol : worst < tol) ? kPass : kToleranceFailure;
  return o;
}

Outcome cmd_observable_eval(const std::string& id, const std::string& grid, const Common& c, Inputs& inputs) {
  const double kappa = resolve_kappa(c);
  const auto probes = grid_points(inputs.read_json(grid));
  Outcome o;
  std::function<cplx(const std::vector<cplx>&)> value;
  std::size_t arity = 1;
  if (id == "left-passage") {
    value = [&](const std::vector<cplx>& p) { return cplx(schramm_left_passage(kappa, std::arg(p[0]))); };
  } else {
    const ObservableSpec spec = catalogue(id, kappa);
    arity = spec.arity;
    value = [spec](const std::vector<cplx>& p) {
      std::vector<FlowState> st;
      for (cplx z : p) st.push_back({z, z, 0.0, 0.0, false});
      return flow_value(spec, st);
    };
  }
  o.csv = "id," + point_header(arity) + ",value_re,value_im\n";
  json rows = json::array();
  for (const auto& p : probes) {
    require(p.size() == arity, ErrorKind::InvalidArgument,
            fmt::format("observable eval: '{}' takes {} point(s) per entry", id, arity));
    for (cplx z : p) require(z.imag() > 0.0, ErrorKind::InvalidArgument, "observable eval: points must be interior");
    const cplx v = value(p);
    o.csv += fmt::format("{},{},{},{}\n", id, tuple_csv(p, arity), num(v.real()), num(v.imag()));
    rows.push_back({{"points", tuple_json(p)}, {"value", complex_json(v)}});
  }
  o.summary = {{"id", id}, {"kappa", kappa}, {"rows", rows}};
  return o;
}

Outcome cmd_numerology(std::vector<double> kappas, const Common& c) {
  if (kappas.empty() && (c.kappa || c.b)) kappas.push_back(resolve_kappa(c));
  if (kappas.empty()) kappas = {2.0, 8.0, 8.0 / 3, 6.0, 3.0, 16.0 / 3, 4.0};
  Outcome o;
  o.csv = "kappa,a,b,c,h,h_prime,eta,eta_prime,kappa_prime\n";
  json rows = json::array();
  for (double k : kappas) {
    const Numerology n = Numerology::from_kappa(k);
    o.csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", num(n.kappa), num(n.a), num(n.b), num(n.c), num(n.h),
                         num(n.h_prime), num(n.eta), num(n.eta_prime), num(n.kappa_prime));
    rows.push_back({{"kappa", n.kappa},
                    {"a", n.a},
                    {"b", n.b},
                    {"c", n.c},
                    {"h", n.h},
                    {"hPrime", n.h_prime},
                    {"eta", n.eta},
                    {"etaPrime", n.eta_prime},
                    {"kappaPrime", n.kappa_prime}});
  }
  o.summary = {{"rows", rows}};
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

json manifest_of(const CLI::App& app, const std::string& command, const std::vector<std::string>& args,
                 const Inputs& inputs) {
  json config = JsonConfig::dump(&app, true);
  std::string hashed = config.dump();
  json files = json::object();
  for (const auto& [path, bytes] : inputs.files) {
    files[path] = sha256_hex(bytes);
    hashed += bytes;
  }
  return {{"tool", "cftlab"}, {"command", command},       {"arguments", args},
          {"config", config}, {"inputFiles", files}, {"inputHash", sha256_hex(hashed)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wick correlators, OPE extraction, identity suites and SLE Monte Carlo"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file (a manifest is accepted)");
  app.option_defaults()->always_capture_default();
  app.fallthrough();
  app.require_subcommand(1);

  Common c;
  auto* kappa = app.add_option("--kappa", c.kappa, "SLE parameter")->envname("CFTLAB_KAPPA");
  app.add_option("--b", c.b, "background charge")->envname("CFTLAB_B")->excludes(kappa);
  app.add_option("--seed", c.seed, "seed base; path k uses seed + k")->envname("CFTLAB_SEED");
  app.add_option("--paths", c.paths, "Monte Carlo paths")->envname("CFTLAB_PATHS");
  app.add_option("--dt", c.dt, "base time step")->envname("CFTLAB_DT");
  app.add_option("--horizon", c.horizon, "time horizon (drift) or horizon factor (estimates)")
      ->envname("CFTLAB_HORIZON");
  app.add_option("--tolerance", c.tolerance, "residual or |z| threshold")->envname("CFTLAB_TOLERANCE");
  app.add_option("--out", c.out, "primary output file (default stdout)")->envname("CFTLAB_OUT");
  app.add_option("--manifest", c.manifest, "manifest file (default <out>.manifest.json, else stderr)")
      ->envname("CFTLAB_MANIFEST");
  app.add_option("--format", c.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("CFTLAB_FORMAT");
  app.add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber)->envname("CFTLAB_WORKERS");
  app.add_option("--step-ratio", c.step_ratio, "adaptive step as a fraction of min |w|^2")
      ->envname("CFTLAB_STEP_RATIO");
  app.add_option("--resolve", c.resolve, "relative scale below which points reach the boundary")
      ->envname("CFTLAB_RESOLVE");

  Inputs inputs;
  std::function<Outcome()> run;
  std::string command;

  auto* correlate_cmd = app.add_subcommand("correlate", "evaluate a correlation query (JSON)");
  std::string query_file;
  std::size_t field_cap = EngineOptions{}.field_cap;
  correlate_cmd->add_option("query", query_file, "query file")->required();
  correlate_cmd->add_option("--field-cap", field_cap, "largest number of basic fields");
  correlate_cmd->callback([&] {
    command = "correlate";
    run = [&] { return cmd_correlate(query_file, field_cap, inputs); };
  });

  auto* ope_cmd = app.add_subcommand("ope", "OPE coefficients of x(zeta) y(z) inside a probe (JSON)");
  std::string ope_file;
  ope_cmd->add_option("query", ope_file, "OPE request file")->required();
  ope_cmd->callback([&] {
    command = "ope";
    run = [&] { return cmd_ope(ope_file, inputs); };
  });

  auto* verify_cmd = app.add_subcommand("verify", "run an identity suite ('all' runs every suite)");
  std::string suite;
  int configurations = SuiteOptions{}.configurations;
  verify_cmd->add_option("suite", suite, "suite name")->required();
  verify_cmd->add_option("--configurations", configurations, "randomized configurations per suite");
  verify_cmd->callback([&] {
    command = "verify";
    run = [&] { return cmd_verify(suite, c, configurations); };
  });

  auto* sle_cmd = app.add_subcommand("sle", "SLE Monte Carlo");
  sle_cmd->require_subcommand(1);
  auto* estimate_cmd = sle_cmd->add_subcommand("estimate", "left-passage, boundary-hit or swallow-order estimates");
  EstimateArgs ea;
  estimate_cmd->add_option("estimator", ea.kind, "left-passage | boundary-hit | swallow-order")->required();
  estimate_cmd->add_option("--grid", ea.grid, "points file {\"points\": [[re, im], ...]}");
  estimate_cmd->add_option("--theta", ea.thetas, "points e^{i theta} on the unit circle");
  estimate_cmd->add_option("--x", ea.x, "boundary point for boundary-hit");
  estimate_cmd->add_option("--u", ea.us, "interval fractions eps / x for boundary-hit");
  estimate_cmd->add_option("--z", ea.z, "interior point (re im) for swallow-order")->expected(2);
  estimate_cmd->add_option("--eta", ea.eta, "negative boundary point for swallow-order");
  estimate_cmd->callback([&] {
    command = "sle estimate";
    run = [&] { return cmd_sle_estimate(ea, c, inputs); };
  });
  auto* drift_cmd = sle_cmd->add_subcommand("drift", "martingale drift of a catalogue observable");
  DriftArgs da;
  drift_cmd->add_option("id", da.id, "observable id")->required();
  drift_cmd->add_option("--grid", da.grid, "probe points file");
  drift_cmd->add_option("--lambda-shift", da.lambda_shift, "perturb the conformal dimension");
  drift_cmd->add_flag("--expect-drift", da.expect_drift, "pass when the drift exceeds the tolerance");
  drift_cmd->callback([&] {
    command = "sle drift";
    run = [&] { return cmd_sle_drift(da, c, inputs); };
  });

  auto* obs_cmd = app.add_subcommand("observable", "closed-form observables");
  obs_cmd->require_subcommand(1);
  auto* eval_cmd = obs_cmd->add_subcommand("eval", "evaluate an observable on a grid");
  std::string obs_id, obs_grid;
  eval_cmd->add_option("id", obs_id, "catalogue id or left-passage")->required();
  eval_cmd->add_option("--grid", obs_grid, "points file {\"points\": [[re, im], ...]}")->required();
  eval_cmd->callback([&] {
    command = "observable eval";
    run = [&] { return cmd_observable_eval(obs_id, obs_grid, c, inputs); };
  });

  auto* num_cmd = app.add_subcommand("numerology", "parameter table for the given kappas");
  std::vector<double> kappas;
  num_cmd->add_option("kappas", kappas, "kappa values (default: the special cases)");
  num_cmd->callback([&] {
    command = "numerology";
    run = [&] { return cmd_numerology(kappas, c); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    const Outcome o = run();
    const std::string primary = c.format == "csv" ? o.csv : o.summary.dump(2) + "\n";
    if (c.out.empty())
      std::cout << primary << std::flush;
    else
      write_text(c.out, primary);
    const std::string manifest =
        manifest_of(app, command, std::vector<std::string>(argv + 1, argv + argc), inputs).dump(2) + "\n";
    if (!c.manifest.empty())
      write_text(c.manifest, manifest);
    else if (!c.out.empty())
      write_text(c.out + ".manifest.json", manifest);
    else
      std::cerr << manifest;
    return o.code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
