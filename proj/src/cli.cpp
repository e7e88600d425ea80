#include "locker/cli.hpp"

#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "locker/bspline.hpp"
#include "locker/io.hpp"
#include "locker/kernelw.hpp"
#include "locker/linkfam.hpp"
#include "locker/longdata.hpp"
#include "locker/simbench.hpp"
#include "locker/tuning.hpp"

namespace locker {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

void report(std::string_view kind, std::string_view message) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
}

struct DataOpts {
  std::string response;
  std::string covariate;
  std::vector<double> domain;  // empty, or {lo, hi}
  std::string family = "gaussian";
  int basis_size = 13;
  int degree = 3;
  int folds = 5;
  std::vector<int> cv_sizes;
  std::vector<double> rho_grid;
  std::vector<double> lambda_grid;
  std::string kernel = "epanechnikov";
  std::optional<double> bandwidth;
  std::uint64_t seed = 1;
  std::string out;
};

struct SimOpts {
  std::string family = "gaussian";
  bool sparse = false;
  bool synchronous = false;
  int n = 200;
  double m = 20.0;
  std::uint64_t seed = 1;
  std::string out;
};

struct BenchOpts {
  std::string scenario;
  std::string family = "gaussian";
  bool sparse = false;
  bool synchronous = false;
  int n = 200;
  double m = 20.0;
  int replicates = 20;
  int basis_size = 13;
  int degree = 3;
  int folds = 5;
  std::vector<int> cv_sizes;
  std::vector<double> rho_grid;
  std::vector<double> lambda_grid;
  std::string kernel = "epanechnikov";
  std::optional<double> bandwidth;
  std::uint64_t seed = 1;
  std::string out;
};

void add_data_flags(CLI::App* cmd, DataOpts& o) {
  cmd->add_option("--response", o.response, "Response CSV (subject_id,time,value)")->required();
  cmd->add_option("--covariate", o.covariate, "Covariate CSV (subject_id,time,value)")->required();
  cmd->add_option("--domain", o.domain, "Time domain LO,HI (default: observed range)")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--family", o.family, "gaussian, bernoulli or poisson");
  cmd->add_option("--L", o.basis_size, "Number of B-spline basis functions");
  cmd->add_option("--degree", o.degree, "B-spline degree");
  cmd->add_option("--folds", o.folds, "Cross-validation folds for --cv-L");
  cmd->add_option("--cv-L", o.cv_sizes, "Candidate L values; chooses L by cross-validation")
      ->delimiter(',');
  cmd->add_option("--rho-grid", o.rho_grid, "Roughness grid, comma separated")->delimiter(',');
  cmd->add_option("--lambda-grid", o.lambda_grid, "Sparseness grid, comma separated")->delimiter(',');
  cmd->add_option("--kernel", o.kernel, "epanechnikov or gaussian");
  cmd->add_option("--bandwidth", o.bandwidth, "Kernel bandwidth override");
  cmd->add_option("--seed", o.seed, "Seed for fold assignment");
  cmd->add_option("--out", o.out, "Output directory")->required();
}

TuningGrid make_grid(const std::vector<double>& rho, const std::vector<double>& lambda) {
  TuningGrid g = TuningGrid::defaults();
  if (!rho.empty()) g.rho = rho;
  if (!lambda.empty()) g.lambda = lambda;
  for (double r : g.rho) {
    if (!(r >= 0.0)) fail(ErrorKind::Usage, "rho grid values must be >= 0");
  }
  for (double l : g.lambda) {
    if (!(l >= 0.0)) fail(ErrorKind::Usage, "lambda grid values must be >= 0");
  }
  return g;
}

void check_basis(int basis_size, int degree) {
  if (degree < 1) fail(ErrorKind::Usage, "--degree must be at least 1");
  if (basis_size < degree + 1) {
    fail(ErrorKind::Usage, "--L must be at least degree + 1");
  }
}

json ebic_json(const EbicBreakdown& e) {
  return {{"score", e.score}, {"dev", e.dev}, {"df", e.df}, {"n0", e.n0}, {"nu", e.nu}};
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// Shared front half of fit and tune.
struct Pipeline {
  Family family;
  Domain original;
  double bandwidth = 0.0;
  std::optional<LSelection> cv;
  int basis_size = 0;
  std::int64_t total_pairs = 0;
  std::size_t subjects = 0;
  RhoLambdaSelection sel;
};

Pipeline run_pipeline(const DataOpts& o) {
  Pipeline p;
  p.family = Family::from_name(o.family);
  const KernelFamily kernel = kernel_from_name(o.kernel);
  if (o.bandwidth && !(*o.bandwidth > 0.0)) fail(ErrorKind::Usage, "--bandwidth must be positive");
  if (o.folds < 2) fail(ErrorKind::Usage, "--folds must be at least 2");
  check_basis(o.basis_size, o.degree);
  for (int l : o.cv_sizes) check_basis(l, o.degree);
  const TuningGrid grid = make_grid(o.rho_grid, o.lambda_grid);

  std::optional<Domain> dom;
  if (!o.domain.empty()) {
    if (!(o.domain[0] < o.domain[1])) fail(ErrorKind::Usage, "--domain needs LO < HI");
    dom = Domain{o.domain[0], o.domain[1]};
  }
  const LongDataset raw = load_csv(o.response, o.covariate, dom);
  p.original = raw.domain();
  const LongDataset ds = rescale_time(raw);
  p.subjects = ds.size();
  p.bandwidth = o.bandwidth ? *o.bandwidth : default_bandwidth(ds);
  const KernelSpec spec{kernel, p.bandwidth};

  TuneOptions tune;
  tune.base.family = p.family;
  p.basis_size = o.basis_size;
  if (!o.cv_sizes.empty()) {
    CvOptions cv;
    cv.degree = o.degree;
    cv.kernel = spec;
    cv.seed = o.seed;
    cv.grid = grid;
    cv.tune = tune;
    p.cv = select_L(ds, p.family, o.cv_sizes, o.folds, cv);
    p.basis_size = p.cv->basis_size;
  }
  const SplineBasis basis(o.degree, p.basis_size - o.degree - 1, ds.domain());
  const FitProblem problem(pair_expand(ds, basis, spec), basis);
  p.total_pairs = problem.pairs().total_pairs;
  p.sel = select_rho_lambda(problem, p.family, grid.rho, grid.lambda, tune);
  return p;
}

int cmd_fit(const DataOpts& o) {
  const Pipeline p = run_pipeline(o);
  const FitResult& f = p.sel.fit;
  json s;
  s["family"] = p.family.name();
  s["kernel"] = to_string(kernel_from_name(o.kernel));
  s["bandwidth"] = p.bandwidth;
  s["subjects"] = p.subjects;
  s["total_pairs"] = p.total_pairs;
  s["domain"] = {p.original.lo, p.original.hi};
  s["L"] = p.basis_size;
  s["degree"] = f.basis.degree();
  json knots = json::array();
  const auto& br = f.basis.breaks();
  for (std::size_t i = 1; i + 1 < br.size(); ++i) knots.push_back(br[i]);
  s["interior_knots"] = knots;
  s["rho"] = p.sel.rho;
  s["lambda"] = p.sel.lambda;
  s["ebic"] = ebic_json(p.sel.best);
  s["iterations"] = f.iterations;
  s["converged"] = f.converged;
  s["active_size"] = f.active.size();
  s["gamma0"] = vec_json(f.gamma0());
  s["gamma1"] = vec_json(f.gamma1());
  if (p.cv) {
    json rows = json::array();
    for (const auto& r : p.cv->table) {
      rows.push_back({{"L", r.basis_size}, {"score", r.score}, {"folds_used", r.folds_used},
                      {"warnings", r.warnings}});
    }
    s["cv"] = rows;
  }
  const fs::path out(o.out);
  write_file_atomic(out / "fit_summary.json", s.dump(2) + "\n");
  write_file_atomic(out / "curves.csv", curves_csv(f));
  if (p.cv) write_file_atomic(out / "cv_table.csv", cv_table_csv(*p.cv));
  return kExitOk;
}

int cmd_tune(const DataOpts& o) {
  const Pipeline p = run_pipeline(o);
  const fs::path out(o.out);
  write_file_atomic(out / "ebic_grid.csv", ebic_table_csv(p.sel));
  if (p.cv) write_file_atomic(out / "cv_table.csv", cv_table_csv(*p.cv));
  for (const auto& row : p.cv ? p.cv->table : std::vector<CvRow>{}) {
    for (const auto& w : row.warnings) report("warning", w);
  }
  return kExitOk;
}

int cmd_simulate(const SimOpts& o) {
  Scenario sc;
  sc.name = "simulate";
  sc.family = Family::from_name(o.family);
  sc.sparse = o.sparse;
  sc.synchronous = o.synchronous;
  sc.n = o.n;
  sc.m = o.m;
  sc.seed = o.seed;
  const auto sim = gen_dataset(sc);
  std::string truth = "t,beta0,beta1\n";
  for (int k = 0; k < kCurveGridPoints; ++k) {
    const double t = static_cast<double>(k) / (kCurveGridPoints - 1);
    truth += format_double(t) + ',' + format_double(sim.truth.beta0(t)) + ',' +
             format_double(sim.truth.beta1(t)) + '\n';
  }
  const fs::path out(o.out);
  write_file_atomic(out / "response.csv", to_csv(sim.data, Channel::Response));
  write_file_atomic(out / "covariate.csv", to_csv(sim.data, Channel::Covariate));
  write_file_atomic(out / "truth.csv", truth);
  return kExitOk;
}

int cmd_benchmark(const BenchOpts& o) {
  if (o.replicates < 1) fail(ErrorKind::Usage, "--replicates must be at least 1");
  if (o.folds < 2) fail(ErrorKind::Usage, "--folds must be at least 2");
  if (o.bandwidth && !(*o.bandwidth > 0.0)) fail(ErrorKind::Usage, "--bandwidth must be positive");
  check_basis(o.basis_size, o.degree);
  std::vector<Scenario> scenarios;
  if (!o.scenario.empty()) {
    scenarios = scenario_preset(o.scenario, o.n, o.seed);
  } else {
    Scenario sc;
    sc.family = Family::from_name(o.family);
    sc.sparse = o.sparse;
    sc.synchronous = o.synchronous;
    sc.n = o.n;
    sc.m = o.m;
    sc.seed = o.seed;
    sc.name = std::string(sc.family.name()) + (sc.sparse ? "-sparse" : "-nonsparse") + "-m" +
              format_double(sc.m) + (sc.synchronous ? "-sync" : "");
    scenarios.push_back(sc);
  }
  for (const auto& sc : scenarios) sc.validate();

  BenchOptions bo;
  bo.basis_size = o.basis_size;
  bo.degree = o.degree;
  bo.kernel = kernel_from_name(o.kernel);
  bo.bandwidth = o.bandwidth.value_or(0.0);
  bo.grid = make_grid(o.rho_grid, o.lambda_grid);
  bo.cv_sizes = o.cv_sizes;
  for (int l : bo.cv_sizes) check_basis(l, o.degree);
  bo.folds = o.folds;
  const auto rep = run_benchmark(scenarios, o.replicates, bo);

  const fs::path out(o.out);
  write_file_atomic(out / "bench.csv", bench_csv(rep));
  const std::string table = bench_table(rep);
  write_file_atomic(out / "bench.txt", table);
  std::cout << table;
  for (const auto& row : rep.rows) {
    for (const auto& r : row.runs) {
      if (!r.ok) report("warning", row.scenario.name + " replicate " + std::to_string(r.index) + ": " + r.error);
    }
  }
  for (const auto& row : rep.rows) {
    if (row.failures == row.replicates) {
      report("benchmark", "scenario " + row.scenario.name + " has no successful replicates");
      return kExitBenchmark;
    }
  }
  return kExitOk;
}

int cmd_curves(const std::string& summary, const std::string& out) {
  const FitResult f = load_fit_summary(summary);
  write_file_atomic(fs::path(out) / "curves.csv", curves_csv(f));
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Parse:
    case ErrorKind::EmptyDataset:
    case ErrorKind::Domain:
      return kExitIo;
    case ErrorKind::Usage:
    case ErrorKind::Parameter:
      return kExitUsage;
    case ErrorKind::Benchmark:
      return kExitBenchmark;
    case ErrorKind::Index:
    case ErrorKind::Numeric:
    case ErrorKind::Singular:
      return kExitNumeric;
  }
  return kExitNumeric;
}

std::string curves_csv(const FitResult& result) {
  const Domain d = result.basis.domain();
  std::string out = "t,beta0_hat,beta1_hat\n";
  for (int k = 0; k < kCurveGridPoints; ++k) {
    double t = d.lo + d.length() * static_cast<double>(k) / (kCurveGridPoints - 1);
    if (k == kCurveGridPoints - 1) t = d.hi;
    const auto b = evaluate_beta(result, t);
    out += format_double(t) + ',' + format_double(b.beta0) + ',' + format_double(b.beta1) + '\n';
  }
  return out;
}

FitResult load_fit_summary(const std::filesystem::path& path) {
  json s;
  try {
    s = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  try {
    const int degree = s.at("degree").get<int>();
    auto knots = s.at("interior_knots").get<std::vector<double>>();
    const auto g0 = s.at("gamma0").get<std::vector<double>>();
    const auto g1 = s.at("gamma1").get<std::vector<double>>();
    FitResult f;
    // Coefficients live on the rescaled [0, 1] time axis.
    f.basis = SplineBasis::with_knots(degree, std::move(knots), Domain{0.0, 1.0});
    const auto l = static_cast<std::size_t>(f.basis.size());
    if (g0.size() != l || g1.size() != l) {
      fail(ErrorKind::Parse, path.string() + ": coefficient length does not match the basis");
    }
    f.gamma.resize(static_cast<Eigen::Index>(2 * l));
    for (std::size_t i = 0; i < l; ++i) {
      f.gamma[static_cast<Eigen::Index>(i)] = g0[i];
      f.gamma[static_cast<Eigen::Index>(l + i)] = g1[i];
    }
    for (std::size_t i = 0; i < 2 * l; ++i) {
      if (f.gamma[static_cast<Eigen::Index>(i)] != 0.0) f.active.push_back(static_cast<int>(i));
    }
    f.iterations = s.value("iterations", 0);
    f.converged = s.value("converged", false);
    return f;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Locally sparse varying coefficient estimation for asynchronous longitudinal data",
               "locker"};
  app.require_subcommand(1);

  DataOpts fit_o, tune_o;
  SimOpts sim_o;
  BenchOpts bench_o;
  std::string summary, curves_out;

  auto* fit_cmd = app.add_subcommand("fit", "Tune by EBIC, fit, write fit_summary.json and curves.csv");
  add_data_flags(fit_cmd, fit_o);
  auto* tune_cmd = app.add_subcommand("tune", "Write the EBIC grid (and CV table with --cv-L)");
  add_data_flags(tune_cmd, tune_o);

  auto* sim_cmd = app.add_subcommand("simulate", "Generate a simulated dataset");
  sim_cmd->add_option("--family", sim_o.family, "gaussian, bernoulli or poisson");
  sim_cmd->add_option("--sparse", sim_o.sparse, "Locally sparse coefficient function");
  sim_cmd->add_option("--synchronous", sim_o.synchronous, "Observe the covariate at the response times");
  sim_cmd->add_option("--n", sim_o.n, "Subjects");
  sim_cmd->add_option("--m", sim_o.m, "Poisson intensity of observation counts");
  sim_cmd->add_option("--seed", sim_o.seed, "Random seed");
  sim_cmd->add_option("--out", sim_o.out, "Output directory")->required();

  auto* bench_cmd = app.add_subcommand("benchmark", "Monte Carlo benchmark");
  bench_cmd->add_option("--scenario", bench_o.scenario, "Preset: gaussian, bernoulli, poisson, sparsity");
  bench_cmd->add_option("--family", bench_o.family, "Family for a single inline scenario");
  bench_cmd->add_option("--sparse", bench_o.sparse, "Locally sparse truth");
  bench_cmd->add_option("--synchronous", bench_o.synchronous, "Synchronous observation times");
  bench_cmd->add_option("--n", bench_o.n, "Subjects per replicate");
  bench_cmd->add_option("--m", bench_o.m, "Poisson intensity of observation counts");
  bench_cmd->add_option("--replicates", bench_o.replicates, "Replicates per scenario");
  bench_cmd->add_option("--L", bench_o.basis_size, "Number of B-spline basis functions");
  bench_cmd->add_option("--degree", bench_o.degree, "B-spline degree");
  bench_cmd->add_option("--folds", bench_o.folds, "Cross-validation folds for --cv-L");
  bench_cmd->add_option("--cv-L", bench_o.cv_sizes, "Candidate L values")->delimiter(',');
  bench_cmd->add_option("--rho-grid", bench_o.rho_grid, "Roughness grid")->delimiter(',');
  bench_cmd->add_option("--lambda-grid", bench_o.lambda_grid, "Sparseness grid")->delimiter(',');
  bench_cmd->add_option("--kernel", bench_o.kernel, "epanechnikov or gaussian");
  bench_cmd->add_option("--bandwidth", bench_o.bandwidth, "Bandwidth override");
  bench_cmd->add_option("--seed", bench_o.seed, "Base seed; replicate r uses seed + r");
  bench_cmd->add_option("--out", bench_o.out, "Output directory")->required();

  auto* curves_cmd = app.add_subcommand("curves", "Re-emit curves.csv from a fit_summary.json");
  curves_cmd->add_option("--summary", summary, "fit_summary.json")->required();
  curves_cmd->add_option("--out", curves_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", e.what());
    return kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_o);
    if (*tune_cmd) return cmd_tune(tune_o);
    if (*sim_cmd) return cmd_simulate(sim_o);
    if (*bench_cmd) return cmd_benchmark(bench_o);
    if (*curves_cmd) return cmd_curves(summary, curves_out);
  } catch (const Error& e) {
    report(to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    report("io", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    report("internal", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace locker
