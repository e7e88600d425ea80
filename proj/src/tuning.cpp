#include "locker/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "locker/error.hpp"
#include "locker/io.hpp"
#include "locker/linalg.hpp"
#include "locker/parallel.hpp"

namespace locker {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

LongDataset subset(const LongDataset& ds, const std::vector<int>& fold_of, int fold, bool inside) {
  std::vector<Subject> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if ((fold_of[i] == fold) == inside) out.push_back(ds[i]);
  }
  return LongDataset(std::move(out), ds.domain());
}

Eigen::VectorXd fitted_means(const Family& fam, const PairDesign& pairs, const Eigen::VectorXd& gamma) {
  Eigen::VectorXd eta = pairs.design * gamma;
  for (Eigen::Index r = 0; r < eta.size(); ++r) eta[r] = fam.mean(eta[r]);
  return eta;
}

bool better(const GridCell& cand, const GridCell& best) {
  if (cand.ebic.score != best.ebic.score) return cand.ebic.score < best.ebic.score;
  if (cand.lambda != best.lambda) return cand.lambda > best.lambda;
  return cand.rho > best.rho;
}

}  // namespace

double ebic_score(double dev, double df, std::int64_t n0, int coefficients, double nu) {
  if (n0 <= 0) fail(ErrorKind::Parameter, "EBIC needs n0 > 0");
  if (!(nu >= 0.0 && nu <= 1.0)) fail(ErrorKind::Parameter, "EBIC nu must lie in [0, 1]");
  const double n = static_cast<double>(n0);
  const double score = std::log(std::max(dev, kDevianceFloor)) + df * std::log(n) / n +
                       nu * df * std::log(static_cast<double>(coefficients)) / n;
  if (!std::isfinite(score)) fail(ErrorKind::Numeric, "non-finite EBIC score");
  return score;
}

double degrees_of_freedom(const FitProblem& problem, std::span<const int> active, double rho0,
                          double rho1) {
  if (active.empty()) return 0.0;
  const Eigen::MatrixXd g = restrict(problem.weighted_gram(), active);
  const Eigen::MatrixXd a = g + restrict(problem.roughness_penalty(rho0, rho1), active);
  // tr{X (A)^{-1} X^T W} = tr{A^{-1} X^T W X}
  return solve_spd(a, g).trace();
}

EbicBreakdown ebic(const FitResult& result, const FitProblem& problem, const FitConfig& cfg,
                   double nu) {
  const auto& pairs = problem.pairs();
  EbicBreakdown out;
  out.nu = nu;
  out.n0 = pairs.retained();
  out.dev = deviance(cfg.family, pairs, fitted_means(cfg.family, pairs, result.gamma));
  out.df = degrees_of_freedom(problem, result.active, cfg.rho0, cfg.rho1);
  out.score = ebic_score(out.dev, out.df, out.n0, problem.columns(), nu);
  return out;
}

TuningGrid TuningGrid::defaults() {
  TuningGrid g;
  for (int e = -6; e <= -1; ++e) g.rho.push_back(std::pow(10.0, e));
  g.lambda.push_back(0.0);
  for (int i = 0; i < 9; ++i) g.lambda.push_back(std::pow(10.0, -4.0 + 0.5 * i));
  return g;
}

RhoLambdaSelection select_rho_lambda(const FitProblem& problem, const Family& fam,
                                     std::span<const double> rho_grid,
                                     std::span<const double> lambda_grid, const TuneOptions& opts) {
  if (rho_grid.empty() || lambda_grid.empty()) fail(ErrorKind::Parameter, "tuning grids must be nonempty");
  const std::size_t cells = rho_grid.size() * lambda_grid.size();
  std::vector<GridCell> table(cells);
  std::vector<FitResult> fits(cells);

  parallel_for(cells, opts.threads, [&](std::size_t c) {
    GridCell& cell = table[c];
    cell.rho = rho_grid[c / lambda_grid.size()];
    cell.lambda = lambda_grid[c % lambda_grid.size()];
    FitConfig cfg = opts.base;
    cfg.family = fam;
    cfg.rho0 = cfg.rho1 = cell.rho;
    cfg.scad.lambda = cell.lambda;
    try {
      fits[c] = fit(problem, cfg);
      cell.ebic = ebic(fits[c], problem, cfg, opts.nu);
      cell.iterations = fits[c].iterations;
      cell.converged = fits[c].converged;
      cell.active_size = fits[c].active.size();
      cell.ok = true;
    } catch (const Error& e) {
      cell.error = e.what();
    }
  });

  std::size_t best = cells;
  for (std::size_t c = 0; c < cells; ++c) {
    if (!table[c].ok) continue;
    if (best == cells || better(table[c], table[best])) best = c;
  }
  if (best == cells) {
    std::string msg = "every tuning grid fit failed:";
    for (const auto& cell : table) {
      msg += " [rho=" + format_double(cell.rho) + " lambda=" + format_double(cell.lambda) + ": " +
             cell.error + "]";
    }
    fail(ErrorKind::Numeric, msg);
  }
  RhoLambdaSelection sel;
  sel.rho = table[best].rho;
  sel.lambda = table[best].lambda;
  sel.best = table[best].ebic;
  sel.fit = std::move(fits[best]);
  sel.table = std::move(table);
  return sel;
}

std::vector<int> assign_folds(const LongDataset& ds, int folds, std::uint64_t seed) {
  if (folds < 2) fail(ErrorKind::Parameter, "cross-validation needs at least 2 folds");
  if (ds.size() < static_cast<std::size_t>(folds)) {
    fail(ErrorKind::Parameter, "fewer subjects than folds");
  }
  struct Key {
    std::uint64_t hash;
    const std::string* id;
    std::size_t index;
  };
  std::vector<Key> keys;
  keys.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    keys.push_back({splitmix64(fnv1a(ds[i].id) ^ splitmix64(seed)), &ds[i].id, i});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return a.hash != b.hash ? a.hash < b.hash : *a.id < *b.id;
  });
  std::vector<int> out(ds.size());
  for (std::size_t r = 0; r < keys.size(); ++r) out[keys[r].index] = static_cast<int>(r % folds);
  return out;
}

LSelection select_L(const LongDataset& ds, const Family& fam, std::span<const int> candidate_sizes,
                    int folds, const CvOptions& opts) {
  if (candidate_sizes.empty()) fail(ErrorKind::Parameter, "no candidate basis sizes");
  for (int l : candidate_sizes) {
    if (l < opts.degree + 2) {
      fail(ErrorKind::Parameter, "basis size " + std::to_string(l) + " needs at least degree + 2");
    }
  }
  const auto fold_of = assign_folds(ds, folds, opts.seed);
  KernelSpec kernel = opts.kernel;
  if (!(kernel.bandwidth > 0.0)) kernel.bandwidth = default_bandwidth(ds);

  LSelection out;
  double best_score = std::numeric_limits<double>::infinity();
  for (int l : candidate_sizes) {
    const SplineBasis basis(opts.degree, l - opts.degree - 1, ds.domain());
    CvRow row;
    row.basis_size = l;
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
      const std::string tag = "L=" + std::to_string(l) + " fold " + std::to_string(f);
      try {
        const auto train = subset(ds, fold_of, f, false);
        const auto test = subset(ds, fold_of, f, true);
        const auto test_pairs = pair_expand(test, basis, kernel);
        if (test_pairs.retained() == 0) {
          row.warnings.push_back(tag + ": held-out subjects have no positive-weight pairs; skipped");
          continue;
        }
        const FitProblem problem(pair_expand(train, basis, kernel), basis);
        const auto sel = select_rho_lambda(problem, fam, opts.grid.rho, opts.grid.lambda, opts.tune);
        const double score =
            deviance(fam, test_pairs, fitted_means(fam, test_pairs, sel.fit.gamma));
        row.fold_scores.push_back(score);
        row.fold_rho.push_back(sel.rho);
        row.fold_lambda.push_back(sel.lambda);
        total += score;
        ++row.folds_used;
      } catch (const Error& e) {
        row.warnings.push_back(tag + ": " + e.what() + "; skipped");
      }
    }
    row.score = row.folds_used > 0 ? total / row.folds_used : std::numeric_limits<double>::infinity();
    if (row.folds_used > 0 && row.score < best_score) {
      best_score = row.score;
      out.basis_size = l;
    }
    out.table.push_back(std::move(row));
  }
  if (out.basis_size == 0) {
    std::string msg = "cross-validation skipped every fold:";
    for (const auto& row : out.table) {
      for (const auto& w : row.warnings) msg += " [" + w + "]";
    }
    fail(ErrorKind::Numeric, msg);
  }
  return out;
}

std::string ebic_table_csv(const RhoLambdaSelection& sel) {
  std::string out = "rho,lambda,ok,score,dev,df,n0,iterations,converged,active_size,selected\n";
  for (const auto& c : sel.table) {
    out += format_double(c.rho) + ',' + format_double(c.lambda) + ',' + (c.ok ? "1" : "0") + ',';
    if (c.ok) {
      out += format_double(c.ebic.score) + ',' + format_double(c.ebic.dev) + ',' +
             format_double(c.ebic.df) + ',' + std::to_string(c.ebic.n0);
    } else {
      out += ",,,";
    }
    out += ',' + std::to_string(c.iterations) + ',' + (c.converged ? "1" : "0") + ',' +
           std::to_string(c.active_size) + ',' +
           (c.ok && c.rho == sel.rho && c.lambda == sel.lambda ? "1" : "0") + '\n';
  }
  return out;
}

std::string cv_table_csv(const LSelection& sel) {
  std::string out = "L,score,folds_used,selected\n";
  for (const auto& r : sel.table) {
    out += std::to_string(r.basis_size) + ',' + format_double(r.score) + ',' +
           std::to_string(r.folds_used) + ',' + (r.basis_size == sel.basis_size ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace locker
