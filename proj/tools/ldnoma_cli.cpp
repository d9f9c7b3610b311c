#include "ldnoma/cavity.hpp"
#include "ldnoma/graphgen.hpp"
#include "ldnoma/io.hpp"
#include "ldnoma/parallel.hpp"
#include "ldnoma/spectra.hpp"
#include "ldnoma/throughput.hpp"
#include "ldnoma/validate.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace ldnoma;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

// Bad flag values caught after parsing; reported like parse errors.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--out", o.out, "Output file (stdout when omitted; a manifest is written next to files)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", o.seed, "Base seed for random streams");
  cmd->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// Renders the table and writes it to --out with its manifest, or to stdout.
void emit(const CommonOptions& o, const Table& table, RunManifest manifest) {
  const std::string content = render(table, parse_output_format(o.format));
  manifest.seed = o.seed;
  if (o.out.empty()) {
    std::cout << content;
    return;
  }
  write_with_manifest(o.out, content, std::move(manifest));
}

DensityParams params_or_usage(double beta, double d) {
  try {
    return DensityParams::make(beta, d);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

// ---- density ---------------------------------------------------------------

struct DensityOptions {
  CommonOptions common;
  double beta = 1.5;
  double d = 2.0;
  int points = 201;
};

int run_density(const DensityOptions& o) {
  if (o.points < 1) throw UsageError("--points must be >= 1");
  const auto p = params_or_usage(o.beta, o.d);
  Table t{{"lambda", "density"}, {}};
  for (int i = 0; i < o.points; ++i) {
    const double lambda =
        o.points == 1 ? p.lambda_minus
                      : p.lambda_minus + (p.lambda_plus - p.lambda_minus) * i / (o.points - 1.0);
    t.add_row({lambda, analytic_density(lambda, p)});
  }
  RunManifest m;
  m.subcommand = "density";
  m.parameters = {{"beta", o.beta}, {"d", o.d}, {"points", o.points}, {"format", o.common.format}};
  m.results = {{"lambda_minus", p.lambda_minus}, {"lambda_plus", p.lambda_plus},
               {"alpha", p.alpha}, {"gamma", p.gamma}};
  emit(o.common, t, m);
  return kExitOk;
}

// ---- cavity ----------------------------------------------------------------

struct CavityOptions {
  CommonOptions common;
  double beta = 1.5;
  double d = 2.0;
  double epsilon = 1e-6;
  int points = 256;
  std::size_t graph_n = 0;
  double graph_epsilon = 1e-3;
  std::string entries = "rademacher";
};

int run_cavity(const CavityOptions& o) {
  if (!(o.epsilon > 0.0)) throw UsageError("--epsilon must be > 0");
  if (o.epsilon > 1e-3) throw UsageError("--epsilon must be <= 1e-3");
  if (!(o.graph_epsilon > 0.0)) throw UsageError("--graph-epsilon must be > 0");
  if (o.points < 1) throw UsageError("--points must be >= 1");
  const auto p = params_or_usage(o.beta, o.d);

  // Interior grid lambda- + (lambda+ - lambda-) i / (points + 1), i = 1..points.
  std::vector<double> grid;
  for (int i = 1; i <= o.points; ++i) {
    grid.push_back(p.lambda_minus + (p.lambda_plus - p.lambda_minus) * i / (o.points + 1.0));
  }
  const auto scalar = stieltjes_inversion(grid, p, o.epsilon, 1e-13, o.common.threads);

  std::vector<InversionPoint> graph;
  if (o.graph_n > 0) {
    const double users = o.beta * static_cast<double>(o.graph_n);
    if (!near_integer(o.d) || !near_integer(users)) {
      throw UsageError("--graph-n needs integer d and integer beta * N");
    }
    EnsembleSpec spec{o.graph_n, static_cast<std::size_t>(std::llround(users)),
                      static_cast<std::size_t>(std::llround(o.d)), parse_entry_mode(o.entries),
                      o.common.seed};
    try {
      spec.validate_regular();
    } catch (const EnsembleError& e) {
      throw UsageError(e.what());
    }
    graph = graph_density(generate_regular(spec), grid, o.graph_epsilon);
  }

  Table t{{"lambda", "density_closed_form", "density_cavity_scalar", "density_cavity_graph",
           "abs_err_scalar", "abs_err_graph"},
          {}};
  double sup_scalar = 0.0, sup_graph = 0.0;
  std::size_t failed_scalar = 0, failed_graph = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = analytic_density(grid[i], p);
    const bool near_edge = grid[i] < p.lambda_minus + 1e-3 || grid[i] > p.lambda_plus - 1e-3;
    std::optional<double> s, es, g, eg;
    if (scalar[i].converged) {
      s = scalar[i].density;
      es = std::abs(*s - exact);
      if (!near_edge) sup_scalar = std::max(sup_scalar, *es);
    } else {
      ++failed_scalar;
    }
    if (!graph.empty()) {
      if (graph[i].converged) {
        g = graph[i].density;
        eg = std::abs(*g - exact);
        if (!near_edge) sup_graph = std::max(sup_graph, *eg);
      } else {
        ++failed_graph;
      }
    }
    t.add_row({grid[i], exact, s, g, es, eg});
  }

  RunManifest m;
  m.subcommand = "cavity";
  m.parameters = {{"beta", o.beta},       {"d", o.d},
                  {"epsilon", o.epsilon}, {"points", o.points},
                  {"graph_n", o.graph_n}, {"graph_epsilon", o.graph_epsilon},
                  {"entries", o.entries}, {"format", o.common.format}};
  m.results = {{"sup_abs_err_scalar", sup_scalar},
               {"failed_points_scalar", failed_scalar},
               {"edge_exclusion", 1e-3},
               {"lambda_minus", p.lambda_minus},
               {"lambda_plus", p.lambda_plus}};
  if (!graph.empty()) {
    m.results["sup_abs_err_graph"] = sup_graph;
    m.results["failed_points_graph"] = failed_graph;
  }
  emit(o.common, t, m);
  return failed_scalar + failed_graph == 0 ? kExitOk : kExitFailure;
}

// ---- simulate --------------------------------------------------------------

struct SimulateOptions {
  CommonOptions common;
  std::size_t n = 520;
  double beta = 1.5;
  std::size_t d = 2;
  std::size_t trials = 200;
  std::string entries = "rademacher";
  std::size_t bins = 100;
  std::string save_matrix;
};

int run_simulate(const SimulateOptions& o) {
  if (o.trials < 1) throw UsageError("--trials must be >= 1");
  if (o.bins < 1) throw UsageError("--bins must be >= 1");
  const double users = o.beta * static_cast<double>(o.n);
  if (!near_integer(users)) throw UsageError("beta * n must be an integer");
  EnsembleSpec spec{o.n, static_cast<std::size_t>(std::llround(users)), o.d,
                    parse_entry_mode(o.entries), o.common.seed};
  try {
    spec.validate_regular();
  } catch (const EnsembleError& e) {
    throw UsageError(e.what());
  }
  const auto p = params_or_usage(spec.beta(), static_cast<double>(o.d));

  std::vector<SpectrumSample> samples(o.trials);
  parallel_for(o.trials, o.common.threads, [&](std::size_t r) {
    const auto a = generate_regular(spec, r);
    if (r == 0 && !o.save_matrix.empty()) {
      std::ofstream os(o.save_matrix);
      if (!os) throw std::runtime_error("cannot open '" + o.save_matrix + "' for writing");
      write_matrix(os, a);
    }
    samples[r] = empirical_spectrum(a, r);
  });
  const auto pool = pool_eigenvalues(samples, true);
  const std::size_t total = o.trials * o.n;
  const double ks = ks_distance(samples, p, true);

  const double lo = p.lambda_minus - 0.1, hi = p.lambda_plus + 0.1;
  const auto h = histogram(pool, lo, hi, o.bins);
  Table t{{"lambda", "analytic_density", "empirical_density"}, {}};
  for (const auto& b : h) t.add_row({b.center, analytic_density(b.center, p), b.density});

  RunManifest m;
  m.subcommand = "simulate";
  m.parameters = {{"n", o.n},         {"k", spec.n_users},       {"beta", spec.beta()},
                  {"d", o.d},         {"trials", o.trials},      {"entries", o.entries},
                  {"bins", o.bins},   {"histogram_lo", lo},      {"histogram_hi", hi},
                  {"format", o.common.format}};
  m.results = {{"ks_distance", ks},
               {"eigenvalues_pooled", pool.size()},
               {"trivial_eigenvalues_excluded", total - pool.size()},
               {"lambda_minus", p.lambda_minus},
               {"lambda_plus", p.lambda_plus}};
  if (!o.save_matrix.empty()) m.results["saved_matrix"] = o.save_matrix;
  emit(o.common, t, m);
  return kExitOk;
}

// ---- throughput / sweep shared ----------------------------------------------

struct McOptions {
  std::size_t n = 200;
  std::size_t trials = 100;
  std::string entries = "rademacher";
};

void add_mc(CLI::App* cmd, McOptions& o) {
  cmd->add_option("--mc-n", o.n, "Resources N for Monte Carlo curves");
  cmd->add_option("--mc-trials", o.trials, "Trials per Monte Carlo point");
  cmd->add_option("--entries", o.entries, "Entry mode for Monte Carlo matrices")
      ->check(CLI::IsMember({"ones", "rademacher"}, CLI::ignore_case));
}

McSettings mc_settings(const McOptions& mc, const CommonOptions& c) {
  if (mc.n < 1) throw UsageError("--mc-n must be >= 1");
  if (mc.trials < 1) throw UsageError("--mc-trials must be >= 1");
  return McSettings{mc.n, mc.trials, parse_entry_mode(mc.entries), c.seed, c.threads};
}

CurveSet curves_or_usage(const std::string& text) {
  try {
    return CurveSet::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

const std::vector<std::string> kCurveColumns = {
    "x", "regular", "dense_rs", "cover_wyner", "regular_mc", "regular_mc_stderr",
    "irregular_mc", "irregular_mc_stderr"};

std::vector<std::optional<double>> row_cells(const SweepRow& r) {
  return {r.x, r.regular, r.dense_rs, r.cover_wyner, r.regular_mc, r.regular_mc_stderr,
          r.irregular_mc, r.irregular_mc_stderr};
}

// ---- throughput ------------------------------------------------------------

struct ThroughputOptions {
  CommonOptions common;
  McOptions mc;
  double beta = 1.5;
  double d = 2.0;
  std::optional<double> snr_db, ebno_db, snr, ebno;
  std::string curves = "analytic";
};

int run_throughput(const ThroughputOptions& o) {
  const int given = (o.snr_db ? 1 : 0) + (o.ebno_db ? 1 : 0) + (o.snr ? 1 : 0) + (o.ebno ? 1 : 0);
  if (given != 1) {
    throw UsageError("give exactly one of --snr-db, --ebno-db, --snr, --ebno");
  }
  params_or_usage(o.beta, o.d);
  const auto curves = curves_or_usage(o.curves);
  const auto mc = mc_settings(o.mc, o.common);

  OperatingPoint op;
  double x = 0.0;
  std::string x_name;
  if (o.snr_db || o.snr) {
    op.kind = OperatingPoint::Kind::Snr;
    op.value = o.snr_db ? db_to_linear(*o.snr_db) : *o.snr;
    x = o.snr_db ? *o.snr_db : *o.snr;
    x_name = o.snr_db ? "snr_db" : "snr";
  } else {
    op.kind = OperatingPoint::Kind::Ebno;
    op.value = o.ebno_db ? db_to_linear(*o.ebno_db) : *o.ebno;
    x = o.ebno_db ? *o.ebno_db : *o.ebno;
    x_name = o.ebno_db ? "ebno_db" : "ebno";
  }
  if (!(op.value > 0.0) || !std::isfinite(op.value)) throw UsageError("operating point must be > 0");

  const auto row = evaluate_point(x, o.beta, o.d, op, curves, mc);
  Table t{kCurveColumns, {}};
  t.add_row(row_cells(row));

  RunManifest m;
  m.subcommand = "throughput";
  m.parameters = {{"beta", o.beta},         {"d", o.d},
                  {"x", x_name},            {"value", x},
                  {"curves", o.curves},     {"mc_n", mc.n_resources},
                  {"mc_trials", mc.trials}, {"entries", o.mc.entries},
                  {"format", o.common.format}};
  m.results = {{"regular", optional_json(row.regular)},
               {"dense_rs", optional_json(row.dense_rs)},
               {"cover_wyner", optional_json(row.cover_wyner)}};
  if (row.regular && row.dense_rs) {
    m.results["regular_exceeds_dense_rs"] = *row.regular > *row.dense_rs;
  }
  if (!row.error.empty()) m.results["error"] = row.error;
  emit(o.common, t, m);
  return row.error.empty() ? kExitOk : kExitFailure;
}

// ---- sweep -----------------------------------------------------------------

struct SweepOptions {
  CommonOptions common;
  McOptions mc;
  std::string variable = "load";
  double lo = 1.0, hi = 3.0;
  std::size_t steps = 5;
  double beta = 1.5, d = 2.0, ebno_db = 10.0;
  std::string curves = "analytic";
};

int run_sweep(const SweepOptions& o) {
  if (o.steps < 1) throw UsageError("--steps must be >= 1");
  if (o.steps > 1 && !(o.hi >= o.lo)) throw UsageError("--hi must be >= --lo");
  SweepSpec s;
  try {
    s.variable = parse_sweep_variable(o.variable);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  s.lo = o.lo;
  s.hi = o.hi;
  s.steps = o.steps;
  s.beta = o.beta;
  s.d = o.d;
  s.ebno_db = o.ebno_db;
  s.curves = curves_or_usage(o.curves);
  s.mc = mc_settings(o.mc, o.common);

  const auto rows = sweep(s);
  Table t{kCurveColumns, {}};
  json errors = json::array();
  for (const auto& r : rows) {
    t.add_row(row_cells(r));
    if (!r.error.empty()) errors.push_back({{"x", r.x}, {"error", r.error}});
  }

  RunManifest m;
  m.subcommand = "sweep";
  m.parameters = {{"variable", std::string(to_string(s.variable))},
                  {"lo", o.lo},
                  {"hi", o.hi},
                  {"steps", o.steps},
                  {"beta", o.beta},
                  {"d", o.d},
                  {"ebno_db", o.ebno_db},
                  {"curves", o.curves},
                  {"mc_n", s.mc.n_resources},
                  {"mc_trials", s.mc.trials},
                  {"entries", o.mc.entries},
                  {"format", o.common.format}};
  m.results = {{"points", rows.size()}, {"point_errors", errors}};
  emit(o.common, t, m);
  return errors.empty() ? kExitOk : kExitFailure;
}

// ---- validate --------------------------------------------------------------

struct ValidateOptions {
  CommonOptions common;
  std::string level = "fast";
  std::string inject_fault;
  std::size_t full_realizations = 1000;
};

int run_validate(const ValidateOptions& o) {
  ValidationContext ctx;
  ctx.seed = o.common.seed;
  ctx.threads = o.common.threads;
  ctx.full_size_realizations = o.full_realizations;
  if (o.inject_fault == "density-sign") ctx.density = sign_flipped_density;
  const auto level = o.level == "full" ? ValidationLevel::Full : ValidationLevel::Fast;

  const auto results = run_validation(level, ctx, [](const CheckResult& r) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << " s): " << r.detail
              << std::endl;
  });
  const auto failed = std::count_if(results.begin(), results.end(),
                                    [](const CheckResult& r) { return !r.passed; });
  std::cout << (results.size() - failed) << "/" << results.size() << " checks passed\n";

  if (!o.common.out.empty()) {
    Table t{{"check", "passed", "seconds"}, {}};
    json report = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      t.add_row({static_cast<double>(i), results[i].passed ? 1.0 : 0.0, results[i].seconds});
      report.push_back({{"index", i},
                        {"name", results[i].name},
                        {"passed", results[i].passed},
                        {"detail", results[i].detail}});
    }
    RunManifest m;
    m.subcommand = "validate";
    m.parameters = {{"level", o.level},
                    {"inject_fault", o.inject_fault},
                    {"full_realizations", o.full_realizations}};
    m.results = {{"checks", report}, {"failed", failed}};
    emit(o.common, t, m);
  }
  return failed == 0 ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra and throughput of regular low-density spreading"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  DensityOptions density;
  auto* c_density = app.add_subcommand("density", "Closed-form limiting density on a grid");
  add_common(c_density, density.common);
  c_density->add_option("--beta", density.beta, "Load K/N");
  c_density->add_option("--d", density.d, "Nonzeros per column");
  c_density->add_option("--points", density.points, "Grid points over [lambda-, lambda+]");

  CavityOptions cavity;
  auto* c_cavity = app.add_subcommand("cavity", "Cavity fixed point and Stieltjes inversion");
  add_common(c_cavity, cavity.common);
  c_cavity->add_option("--beta", cavity.beta, "Load K/N");
  c_cavity->add_option("--d", cavity.d, "Nonzeros per column");
  c_cavity->add_option("--epsilon", cavity.epsilon, "Imaginary offset for the scalar route");
  c_cavity->add_option("--points", cavity.points, "Interior grid points");
  c_cavity->add_option("--graph-n", cavity.graph_n, "Also run message passing on one N-resource graph");
  c_cavity->add_option("--graph-epsilon", cavity.graph_epsilon, "Imaginary offset for the graph route");
  c_cavity->add_option("--entries", cavity.entries, "Entry mode of the sampled graph")
      ->check(CLI::IsMember({"ones", "rademacher"}, CLI::ignore_case));

  SimulateOptions simulate;
  auto* c_sim = app.add_subcommand("simulate", "Pooled empirical spectra of sampled matrices");
  add_common(c_sim, simulate.common);
  c_sim->add_option("--n", simulate.n, "Resources N");
  c_sim->add_option("--beta", simulate.beta, "Load K/N");
  c_sim->add_option("--d", simulate.d, "Nonzeros per column");
  c_sim->add_option("--trials", simulate.trials, "Realizations");
  c_sim->add_option("--entries", simulate.entries, "Entry mode")
      ->check(CLI::IsMember({"ones", "rademacher"}, CLI::ignore_case));
  c_sim->add_option("--bins", simulate.bins, "Histogram bins over [lambda- - 0.1, lambda+ + 0.1]");
  c_sim->add_option("--save-matrix", simulate.save_matrix, "Write realization 0 in text form");

  ThroughputOptions tp;
  auto* c_tp = app.add_subcommand("throughput", "Throughput curves at one operating point");
  add_common(c_tp, tp.common);
  add_mc(c_tp, tp.mc);
  c_tp->add_option("--beta", tp.beta, "Load K/N");
  c_tp->add_option("--d", tp.d, "Nonzeros per column");
  c_tp->add_option("--snr-db", tp.snr_db, "Per-user SNR in dB");
  c_tp->add_option("--ebno-db", tp.ebno_db, "Eb/N0 in dB (each curve at its own SNR)");
  c_tp->add_option("--snr", tp.snr, "Per-user SNR, linear");
  c_tp->add_option("--ebno", tp.ebno, "Eb/N0, linear");
  c_tp->add_option("--curves", tp.curves,
                   "regular,dense_rs,cover_wyner,regular_mc,irregular_mc | analytic | all");

  SweepOptions sw;
  auto* c_sw = app.add_subcommand("sweep", "Curves along load, sparsity or Eb/N0");
  add_common(c_sw, sw.common);
  add_mc(c_sw, sw.mc);
  c_sw->add_option("--variable", sw.variable, "load | sparsity | ebno");
  c_sw->add_option("--lo", sw.lo, "First grid value");
  c_sw->add_option("--hi", sw.hi, "Last grid value");
  c_sw->add_option("--steps", sw.steps, "Grid points (load keeps integer beta*d only)");
  c_sw->add_option("--beta", sw.beta, "Load when not swept");
  c_sw->add_option("--d", sw.d, "Sparsity when not swept");
  c_sw->add_option("--ebno-db", sw.ebno_db, "Eb/N0 in dB when not swept");
  c_sw->add_option("--curves", sw.curves,
                   "regular,dense_rs,cover_wyner,regular_mc,irregular_mc | analytic | all");

  ValidateOptions val;
  auto* c_val = app.add_subcommand("validate", "Run the invariant suite");
  add_common(c_val, val.common);
  c_val->add_option("--level", val.level, "fast | full")->check(CLI::IsMember({"fast", "full"}));
  c_val->add_option("--inject-fault", val.inject_fault, "Corrupt the density to test the suite")
      ->check(CLI::IsMember({"density-sign"}));
  c_val->add_option("--full-realizations", val.full_realizations,
                    "Realizations for the N=2600 spectrum check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_density) return run_density(density);
    if (*c_cavity) return run_cavity(cavity);
    if (*c_sim) return run_simulate(simulate);
    if (*c_tp) return run_throughput(tp);
    if (*c_sw) return run_sweep(sw);
    if (*c_val) return run_validate(val);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
