#include "locker/simbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "locker/error.hpp"
#include "locker/io.hpp"
#include "locker/irls.hpp"
#include "locker/parallel.hpp"

namespace locker {
namespace {

std::string subject_id(int i, int n) {
  const int width = std::max(3, static_cast<int>(std::to_string(n).size()));
  std::string digits = std::to_string(i + 1);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
  return "s" + digits;
}

std::vector<double> uniform_times(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> t(static_cast<std::size_t>(count));
  for (auto& v : t) v = unif(rng);
  return t;
}

std::string cell(const Summary& s) {
  return format_double(s.mean, 4) + " (" + format_double(s.sd, 4) + ")";
}

}  // namespace

void Scenario::validate() const {
  if (n < 1) fail(ErrorKind::Usage, "scenario needs n >= 1");
  if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorKind::Usage, "scenario needs m > 0");
}

TrueFunctions::TrueFunctions(bool sparse) : sparse_(sparse), sparse_basis_(3, 9) {}

double TrueFunctions::beta0(double t) const { return std::cos(2.0 * std::numbers::pi * t); }

double TrueFunctions::beta1(double t) const {
  if (!sparse_) return std::sin(2.0 * std::numbers::pi * t);
  const auto b = sparse_basis_.evaluate(t);
  return 2.0 * (b[5] + b[6]);  // B_6 + B_7, one-based
}

SplineBasis covariate_basis() { return SplineBasis(4, 69); }

SimulatedData gen_dataset(const Scenario& sc, const GenerationOptions& opts) {
  sc.validate();
  std::mt19937_64 rng(sc.seed);
  std::poisson_distribution<int> counts(sc.m);
  std::normal_distribution<double> normal(0.0, 1.0);

  const TrueFunctions truth(sc.sparse);
  const SplineBasis xbasis = covariate_basis();
  const int nx = xbasis.size();
  const auto& fam = sc.family;

  std::vector<Subject> subjects;
  subjects.reserve(static_cast<std::size_t>(sc.n));
  std::int64_t clamped = 0, drawn = 0;
  Eigen::VectorXd a(nx);
  for (int i = 0; i < sc.n; ++i) {
    const int li = counts(rng) + 1;
    const int mi = sc.synchronous ? li : counts(rng) + 1;
    for (int l = 0; l < nx; ++l) a[l] = normal(rng);
    auto x_at = [&](double t) {
      const auto loc = xbasis.local(t);
      return loc.values.dot(a.segment(loc.first, xbasis.degree() + 1));
    };

    const auto t_resp = uniform_times(rng, li);
    const auto t_cov = sc.synchronous ? t_resp : uniform_times(rng, mi);

    Subject s;
    s.id = subject_id(i, sc.n);
    for (double t : t_cov) s.covariate.push_back({t, x_at(t)});
    for (double t : t_resp) {
      const double eta = truth.beta0(t) + truth.beta1(t) * x_at(t);
      double y = 0.0;
      ++drawn;
      switch (fam.kind()) {
        case FamilyKind::Gaussian:
          y = eta + normal(rng);
          break;
        case FamilyKind::Bernoulli: {
          const double raw = opts.mean_mode == MeanMode::Link ? fam.mean(eta) : eta;
          const double p = std::clamp(raw, 0.01, 0.99);
          if (p != raw) ++clamped;
          y = std::bernoulli_distribution(p)(rng) ? 1.0 : 0.0;
          break;
        }
        case FamilyKind::Poisson: {
          const double raw = opts.mean_mode == MeanMode::Link ? fam.mean(eta) : eta;
          const double mu = std::max(raw, 0.01);
          if (mu != raw) ++clamped;
          y = static_cast<double>(std::poisson_distribution<int>(mu)(rng));
          break;
        }
      }
      s.response.push_back({t, y});
    }
    subjects.push_back(std::move(s));
  }
  return SimulatedData{LongDataset(std::move(subjects), Domain{0.0, 1.0}), truth,
                       drawn > 0 ? static_cast<double>(clamped) / static_cast<double>(drawn) : 0.0};
}

double ise(const CurveFn& estimate, const CurveFn& truth) {
  const int n = kMetricGridPoints;
  const double step = 1.0 / (n - 1);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = k * step;
    const double e = estimate(t), v = truth(t);
    if (!std::isfinite(e) || !std::isfinite(v)) fail(ErrorKind::Numeric, "non-finite curve value");
    const double sq = (e - v) * (e - v);
    acc += (k == 0 || k == n - 1) ? 0.5 * sq : sq;
  }
  return acc * step;
}

TpFn tpfn(const CurveFn& beta1_hat, const CurveFn& beta1_true) {
  const int n = kMetricGridPoints;
  std::vector<char> zt(n), zh(n);
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / (n - 1);
    zt[k] = std::abs(beta1_true(t)) < kZeroThreshold;
    zh[k] = std::abs(beta1_hat(t)) < kZeroThreshold;
  }
  // An isolated zero (a sign change of the truth) is neither a zero region
  // nor a nonzero point; it counts toward neither rate.
  int true_zero = 0, both_zero = 0, true_nonzero = 0, false_zero = 0;
  for (int k = 0; k < n; ++k) {
    const bool region = zt[k] && ((k > 0 && zt[k - 1]) || (k + 1 < n && zt[k + 1]));
    if (region) {
      ++true_zero;
      if (zh[k]) ++both_zero;
    } else if (!zt[k]) {
      ++true_nonzero;
      if (zh[k]) ++false_zero;
    }
  }
  TpFn out;
  if (true_zero > 0) out.tp = static_cast<double>(both_zero) / true_zero;
  out.fn = true_nonzero > 0 ? static_cast<double>(false_zero) / true_nonzero : 0.0;
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

ReplicateResult run_replicate(const Scenario& sc, int index, const BenchOptions& opts) {
  ReplicateResult r;
  r.index = index;
  r.seed = sc.seed + static_cast<std::uint64_t>(index);
  try {
    Scenario rep = sc;
    rep.seed = r.seed;
    const auto sim = gen_dataset(rep, opts.generation);
    r.clamp_rate = sim.clamp_rate;
    KernelSpec kernel{opts.kernel, opts.bandwidth > 0.0 ? opts.bandwidth : default_bandwidth(sim.data)};
    r.bandwidth = kernel.bandwidth;

    TuneOptions tune = opts.tune;
    tune.base.family = sc.family;
    int l = opts.basis_size;
    if (!opts.cv_sizes.empty()) {
      CvOptions cv;
      cv.degree = opts.degree;
      cv.kernel = kernel;
      cv.seed = r.seed;
      cv.grid = opts.grid;
      cv.tune = tune;
      l = select_L(sim.data, sc.family, opts.cv_sizes, opts.folds, cv).basis_size;
    }
    const SplineBasis basis(opts.degree, l - opts.degree - 1, sim.data.domain());
    const FitProblem problem(pair_expand(sim.data, basis, kernel), basis);
    const auto sel = select_rho_lambda(problem, sc.family, opts.grid.rho, opts.grid.lambda, tune);

    const auto& fit = sel.fit;
    const auto& truth = sim.truth;
    r.ise0 = ise([&](double t) { return evaluate_beta(fit, t).beta0; },
                 [&](double t) { return truth.beta0(t); });
    r.ise1 = ise([&](double t) { return evaluate_beta(fit, t).beta1; },
                 [&](double t) { return truth.beta1(t); });
    const auto tf = tpfn([&](double t) { return evaluate_beta(fit, t).beta1; },
                         [&](double t) { return truth.beta1(t); });
    r.tp = tf.tp;
    r.fn = tf.fn;
    r.rho = sel.rho;
    r.lambda = sel.lambda;
    r.basis_size = l;
    r.converged = fit.converged;
    r.ok = true;
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

BenchReport run_benchmark(std::span<const Scenario> scenarios, int replicates,
                          const BenchOptions& opts) {
  if (replicates < 1) fail(ErrorKind::Usage, "benchmark needs at least one replicate");
  for (const auto& sc : scenarios) sc.validate();

  BenchOptions inner = opts;
  // Parallelism lives at the replicate level; grid fits run sequentially.
  inner.tune.threads = 1;

  BenchReport report;
  for (const auto& sc : scenarios) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioReport row;
    row.scenario = sc;
    row.replicates = replicates;
    row.runs.resize(static_cast<std::size_t>(replicates));
    parallel_for(static_cast<std::size_t>(replicates), opts.threads, [&](std::size_t r) {
      row.runs[r] = run_replicate(sc, static_cast<int>(r), inner);
    });

    std::vector<double> ise0, ise1, tp, fn, clamp;
    for (const auto& run : row.runs) {
      if (!run.ok) {
        ++row.failures;
        continue;
      }
      ise0.push_back(run.ise0);
      ise1.push_back(run.ise1);
      fn.push_back(run.fn);
      clamp.push_back(run.clamp_rate);
      if (run.tp) tp.push_back(*run.tp);
    }
    row.ise0 = summarize(ise0);
    row.ise1 = summarize(ise1);
    row.fn = summarize(fn);
    if (!tp.empty()) row.tp = summarize(tp);
    row.clamp_rate = summarize(clamp).mean;
    row.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::string out =
      "scenario,family,sparse,synchronous,n,m,seed,replicates,failures,ise0_mean,ise0_sd,"
      "ise1_mean,ise1_sd,tp_mean,tp_sd,fn_mean,fn_sd,clamp_rate\n";
  for (const auto& r : report.rows) {
    const auto& sc = r.scenario;
    out += sc.name + ',' + std::string(sc.family.name()) + ',' + (sc.sparse ? "1" : "0") + ',' +
           (sc.synchronous ? "1" : "0") + ',' + std::to_string(sc.n) + ',' + format_double(sc.m) +
           ',' + std::to_string(sc.seed) + ',' + std::to_string(r.replicates) + ',' +
           std::to_string(r.failures) + ',' + format_double(r.ise0.mean) + ',' +
           format_double(r.ise0.sd) + ',' + format_double(r.ise1.mean) + ',' +
           format_double(r.ise1.sd) + ',';
    if (r.tp) {
      out += format_double(r.tp->mean) + ',' + format_double(r.tp->sd);
    } else {
      out += ',';
    }
    out += ',' + format_double(r.fn.mean) + ',' + format_double(r.fn.sd) + ',' +
           format_double(r.clamp_rate) + '\n';
  }
  return out;
}

std::string bench_table(const BenchReport& report) {
  const std::vector<std::string> header = {"scenario", "family",  "truth",    "n", "m",
                                           "ISE0",     "ISE1",    "TP",       "FN", "runs"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    const auto& sc = r.scenario;
    std::string truth = sc.sparse ? "sparse" : "nonsparse";
    if (sc.synchronous) truth += "/sync";
    rows.push_back({sc.name, std::string(sc.family.name()), truth, std::to_string(sc.n),
                    format_double(sc.m), cell(r.ise0), cell(r.ise1), r.tp ? cell(*r.tp) : "--",
                    cell(r.fn),
                    std::to_string(r.replicates - r.failures) + "/" + std::to_string(r.replicates)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) s += "  ";
      s += cells[c];
      if (c + 1 < cells.size()) s.append(width[c] - cells[c].size(), ' ');
    }
    return s + '\n';
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
  for (const auto& row : rows) out += line(row);
  return out;
}

std::vector<Scenario> scenario_preset(const std::string& name, int n, std::uint64_t seed) {
  std::vector<Scenario> out;
  auto add = [&](Family fam, bool sparse, double m, bool sync) {
    Scenario sc;
    sc.family = fam;
    sc.sparse = sparse;
    sc.n = n;
    sc.m = m;
    sc.seed = seed;
    sc.synchronous = sync;
    sc.name = std::string(fam.name()) + (sparse ? "-sparse" : "-nonsparse") + "-m" +
              format_double(m) + (sync ? "-sync" : "");
    out.push_back(sc);
  };
  if (name == "gaussian" || name == "bernoulli" || name == "poisson") {
    const auto fam = Family::from_name(name);
    for (bool sparse : {false, true}) {
      for (double m : {15.0, 20.0}) add(fam, sparse, m, false);
    }
  } else if (name == "sparsity") {
    for (double m : {15.0, 20.0}) {
      for (bool sparse : {false, true}) add(Family(FamilyKind::Gaussian), sparse, m, true);
    }
  } else {
    fail(ErrorKind::Usage, "unknown scenario preset '" + name +
                               "' (expected gaussian, bernoulli, poisson or sparsity)");
  }
  return out;
}

}  // namespace locker
