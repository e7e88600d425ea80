#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "locker/error.hpp"
#include "locker/irls.hpp"
#include "locker/kernelw.hpp"
#include "locker/simbench.hpp"
#include "test_support.hpp"

using namespace locker;

namespace {

// Normal equations accumulated straight from the observations.
struct Oracle {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double n0 = 0.0;
};

Oracle oracle_system(const LongDataset& ds, const SplineBasis& basis, const KernelSpec& k,
                     const Family& fam, const Eigen::VectorXd* gamma, double rho0, double rho1) {
  const int l = basis.size();
  Oracle o;
  o.a = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  o.b = Eigen::VectorXd::Zero(2 * l);
  for (const auto& s : ds.subjects()) {
    for (const auto& r : s.response) {
      for (const auto& c : s.covariate) {
        o.n0 += 1.0;
        const double w = kernel_weight(k, r.time - c.time);
        if (w <= 0.0) continue;
        Eigen::VectorXd row(2 * l);
        const Eigen::VectorXd bs = basis.evaluate(c.time);
        row << bs, c.value * bs;
        double h = 1.0, z = r.value;
        if (gamma) {
          const double eta = row.dot(*gamma);
          h = fam.mean_deriv(eta);
          z = eta + (r.value - fam.mean(eta)) / h;
        }
        o.a += w * h * row * row.transpose();
        o.b += w * h * z * row;
      }
    }
  }
  const Eigen::MatrixXd v = basis.roughness_matrix();
  o.a.topLeftCorner(l, l) += o.n0 * rho0 * v;
  o.a.bottomRightCorner(l, l) += o.n0 * rho1 * v;
  return o;
}

std::vector<int> all(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

double rel_err(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return (x - y).cwiseAbs().maxCoeff() / std::max(1.0, y.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("noiseless synchronous data are recovered exactly") {
  const SplineBasis basis(3, 5);
  const int l = basis.size();
  Eigen::VectorXd truth(2 * l);
  for (int i = 0; i < 2 * l; ++i) truth[i] = std::sin(1.3 * i) + 0.2;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> grid(0, 100);
  std::normal_distribution<double> z;
  std::vector<Subject> subjects;
  for (int i = 0; i < 50; ++i) {
    Subject s;
    s.id = "s" + std::to_string(i);
    std::vector<int> ticks;
    while (ticks.size() < 10) {
      const int t = grid(rng);
      if (std::find(ticks.begin(), ticks.end(), t) == ticks.end()) ticks.push_back(t);
    }
    for (int t : ticks) {
      const double time = t / 100.0;
      const double x = z(rng);
      Eigen::VectorXd row(2 * l);
      row << basis.evaluate(time), x * basis.evaluate(time);
      s.response.push_back({time, row.dot(truth)});
      s.covariate.push_back({time, x});
    }
    subjects.push_back(std::move(s));
  }
  const LongDataset ds(std::move(subjects), {0.0, 1.0});
  // narrower than the grid spacing: only the matched pairs carry weight
  const auto pairs = pair_expand(ds, basis, {KernelFamily::Epanechnikov, 1e-3});
  REQUIRE(pairs.retained() == 500);
  const auto res = fit(pairs, FitConfig{}, basis);
  CHECK(res.converged);
  CHECK((res.gamma - truth).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("closed form and one-step agreement with the normal equations") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto ds = testing::random_dataset(rng, 20, 6);
    const SplineBasis basis(3, 3);
    const KernelSpec k{KernelFamily::Epanechnikov, 0.2};
    const auto pairs = pair_expand(ds, basis, k);
    const FitProblem problem(pairs, basis);
    FitConfig cfg;
    cfg.rho0 = 1e-3;
    cfg.rho1 = 1e-2;
    const auto o = oracle_system(ds, basis, k, cfg.family, nullptr, cfg.rho0, cfg.rho1);
    REQUIRE(problem.normalizer() == o.n0);
    const Eigen::VectorXd closed = o.a.ldlt().solve(o.b);
    CHECK(rel_err(initial_gamma(problem, cfg), closed) < 1e-8);
    const auto res = fit(problem, cfg);
    CHECK(rel_err(res.gamma, closed) < 1e-8);
    CHECK(res.iterations <= 2);
  }
}

TEST_CASE("bernoulli IRLS step matches a hand-built update") {
  std::mt19937_64 rng(9);
  Scenario sc;
  sc.family = Family(FamilyKind::Bernoulli);
  sc.n = 30;
  sc.synchronous = true;
  sc.seed = 4;
  const auto ds = gen_dataset(sc).data;
  const SplineBasis basis(3, 2);  // L = 6
  const KernelSpec k{KernelFamily::Epanechnikov, default_bandwidth(ds)};
  const FitProblem problem(pair_expand(ds, basis, k), basis);
  FitConfig cfg;
  cfg.family = sc.family;
  cfg.rho0 = cfg.rho1 = 1e-4;
  std::normal_distribution<double> z(0.0, 0.3);
  Eigen::VectorXd prev(12);
  for (auto& e : prev) e = z(rng);
  const auto o = oracle_system(ds, basis, k, cfg.family, &prev, cfg.rho0, cfg.rho1);
  const Eigen::VectorXd expect = o.a.ldlt().solve(o.b);
  const auto step = irls_step(problem, prev, all(12), cfg);
  CHECK(rel_err(step.gamma, expect) < 1e-8);
  CHECK(step.residual < 1e-8);
}

TEST_CASE("iteration cap reports non-convergence") {
  Scenario sc;
  sc.family = Family(FamilyKind::Bernoulli);
  sc.n = 40;
  const auto ds = gen_dataset(sc).data;
  const SplineBasis basis(3, 4);
  const FitProblem problem(pair_expand(ds, basis, {KernelFamily::Epanechnikov, default_bandwidth(ds)}),
                           basis);
  FitConfig cfg;
  cfg.family = sc.family;
  cfg.rho0 = cfg.rho1 = 1e-3;
  cfg.max_iter = 1;
  const auto one = fit(problem, cfg);
  CHECK(one.iterations == 1);
  CHECK_FALSE(one.converged);
  cfg.max_iter = 100;
  const auto full = fit(problem, cfg);
  CHECK(full.converged);
  CHECK(fixed_point_defect(problem, full, cfg) < 1e-4);
}

TEST_CASE("roughness penalty shrinks curvature") {
  std::mt19937_64 rng(2);
  const auto ds = testing::random_dataset(rng, 60, 8);
  const SplineBasis basis(3, 8);
  const FitProblem problem(pair_expand(ds, basis, {KernelFamily::Epanechnikov, 0.1}), basis);
  const Eigen::MatrixXd v = basis.roughness_matrix();
  const int l = basis.size();
  double prev0 = INFINITY, prev1 = INFINITY;
  for (double rho : {1e-4, 1e-2, 1.0}) {
    FitConfig cfg;
    cfg.rho0 = cfg.rho1 = rho;
    const auto res = fit(problem, cfg);
    const Eigen::VectorXd g0 = res.gamma.head(l), g1 = res.gamma.tail(l);
    const double c0 = std::sqrt(g0.dot(v * g0)), c1 = std::sqrt(g1.dot(v * g1));
    CHECK(c0 <= prev0);
    CHECK(c1 <= prev1);
    prev0 = c0;
    prev1 = c1;
  }
}

TEST_CASE("unidentified coefficients raise a singular error") {
  std::vector<Subject> one{{"a", {{0.5, 1.0}}, {{0.5, 2.0}}}};
  const LongDataset ds(std::move(one), {0.0, 1.0});
  const SplineBasis basis(0, 1);  // L = 2
  const auto pairs = pair_expand(ds, basis, {KernelFamily::Epanechnikov, 0.1});
  REQUIRE(pairs.retained() == 1);
  try {
    fit(pairs, FitConfig{}, basis);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Singular);
  }
}

TEST_CASE("weights scaled together with N0 leave the estimate unchanged") {
  std::mt19937_64 rng(17);
  Scenario sc;
  sc.family = Family(FamilyKind::Poisson);
  sc.n = 40;
  const auto ds = gen_dataset(sc).data;
  const SplineBasis basis(3, 4);
  auto pairs = pair_expand(ds, basis, {KernelFamily::Epanechnikov, default_bandwidth(ds)});
  FitConfig cfg;
  cfg.family = sc.family;
  cfg.rho0 = cfg.rho1 = 1e-3;
  cfg.scad.lambda = 0.01;
  const auto base = fit(pairs, cfg, basis);
  pairs.weight *= 3.0;
  pairs.total_pairs *= 3;
  const auto scaled = fit(pairs, cfg, basis);
  CHECK(rel_err(scaled.gamma, base.gamma) < 1e-8);
}

TEST_CASE("active set only shrinks across iterations") {
  Scenario sc;
  sc.sparse = true;
  sc.synchronous = true;
  sc.m = 15;
  sc.seed = 3;
  const auto ds = gen_dataset(sc).data;
  const SplineBasis basis(3, 9);
  const FitProblem problem(pair_expand(ds, basis, {KernelFamily::Epanechnikov, default_bandwidth(ds)}),
                           basis);
  FitConfig cfg;
  cfg.rho0 = cfg.rho1 = 1e-5;
  cfg.scad.lambda = 0.1;
  cfg.shrink_eps = 1e-2;
  std::vector<int> prev = all(26);
  for (int q = 1; q <= 15; ++q) {
    cfg.max_iter = q;
    const auto res = fit(problem, cfg);
    CHECK(std::includes(prev.begin(), prev.end(), res.active.begin(), res.active.end()));
    for (int i = 0; i < 26; ++i) {
      if (!std::binary_search(res.active.begin(), res.active.end(), i)) CHECK(res.gamma[i] == 0.0);
    }
    // gamma0 is never shrunk
    CHECK(std::count_if(res.active.begin(), res.active.end(), [](int i) { return i < 13; }) == 13);
    prev = res.active;
    if (res.converged) break;
  }
}

TEST_CASE("evaluate_beta") {
  FitResult r;
  r.basis = SplineBasis(3, 4);
  const int l = r.basis.size();
  r.gamma = Eigen::VectorXd::Zero(2 * l);
  r.gamma.head(l).setOnes();
  for (double t : {0.0, 0.37, 1.0}) {
    CHECK(evaluate_beta(r, t).beta0 == Catch::Approx(1.0));
    CHECK(evaluate_beta(r, t).beta1 == 0.0);
  }
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  for (auto& e : r.gamma) e = z(rng);
  for (double t : {0.05, 0.5, 0.99}) {
    const Eigen::VectorXd b = r.basis.evaluate(t);
    CHECK(evaluate_beta(r, t).beta0 == Catch::Approx(b.dot(r.gamma0())).epsilon(1e-12));
    CHECK(evaluate_beta(r, t).beta1 == Catch::Approx(b.dot(r.gamma1())).epsilon(1e-12));
  }
}

TEST_CASE("sparse truth: coefficients of the support stay nonzero") {
  int hits = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    Scenario sc;
    sc.sparse = true;
    sc.synchronous = true;
    sc.m = 15;
    sc.seed = 100 + s;
    const auto ds = gen_dataset(sc).data;
    const SplineBasis basis(3, 9);
    const FitProblem problem(
        pair_expand(ds, basis, {KernelFamily::Epanechnikov, default_bandwidth(ds)}), basis);
    FitConfig cfg;
    cfg.rho0 = cfg.rho1 = 1e-5;
    cfg.scad.lambda = 0.1;
    const auto res = fit(problem, cfg);
    const auto g1 = res.gamma1();
    if (g1[5] != 0.0 && g1[6] != 0.0) ++hits;
  }
  CHECK(hits >= 18);
}

TEST_CASE("invalid configuration") {
  FitConfig cfg;
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = FitConfig{};
  cfg.rho0 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
