#include "locker/irls.hpp"

#include <cmath>
#include <numeric>

#include "locker/error.hpp"
#include "locker/linalg.hpp"

namespace locker {
namespace {

struct LinearSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

/// Update equation at `gamma`: (X'WHX/N0 + V_rho + U) g = X'WHZ/N0.
LinearSystem assemble(const FitProblem& problem, const Eigen::VectorXd& gamma,
                      const FitConfig& cfg) {
  const auto& pairs = problem.pairs();
  const int l = problem.basis().size();
  LinearSystem sys;
  if (cfg.family.kind() == FamilyKind::Gaussian) {
    // Z = Y and H = I exactly.
    sys.a = problem.weighted_gram();
    sys.b = problem.weighted_cross();
  } else {
    const Eigen::VectorXd eta = pairs.design * gamma;
    const auto wq = working_quantities(cfg.family, eta, pairs.response);
    const Eigen::VectorXd wh = pairs.weight.cwiseProduct(wq.h);
    const double n0 = problem.normalizer();
    const Eigen::MatrixXd xs = pairs.design.array().colwise() * wh.array().sqrt();
    sys.a.noalias() = xs.transpose() * xs;
    sys.a /= n0;
    sys.b.noalias() = pairs.design.transpose() * wh.cwiseProduct(wq.z);
    sys.b /= n0;
  }
  sys.a += problem.roughness_penalty(cfg.rho0, cfg.rho1);
  if (cfg.scad.lambda > 0.0) {
    const auto lqa = lqa_matrix(gamma.tail(l), problem.basis(), problem.grams(), cfg.scad);
    sys.a += lqa.u;
  }
  return sys;
}

double defect(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  if (x.size() == 0) return 0.0;
  return (a * x - b).cwiseAbs().maxCoeff();
}

std::vector<int> all_columns(int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

void FitConfig::validate() const {
  if (!(rho0 >= 0.0) || !(rho1 >= 0.0) || !std::isfinite(rho0) || !std::isfinite(rho1)) {
    fail(ErrorKind::Parameter, "roughness parameters must be finite and >= 0");
  }
  scad.validate();
  if (max_iter < 1) fail(ErrorKind::Parameter, "max_iter must be at least 1");
  if (!(tol > 0.0)) fail(ErrorKind::Parameter, "tol must be positive");
  if (!(shrink_eps >= 0.0)) fail(ErrorKind::Parameter, "shrink_eps must be nonnegative");
}

BetaValue evaluate_beta(const FitResult& result, double t) {
  const auto loc = result.basis.local(t);
  const int l = result.basis.size();
  const int k = result.basis.degree() + 1;
  return {loc.values.dot(result.gamma.segment(loc.first, k)),
          loc.values.dot(result.gamma.segment(l + loc.first, k))};
}

FitProblem::FitProblem(PairDesign pairs, SplineBasis basis)
    : pairs_(std::move(pairs)), basis_(std::move(basis)) {
  if (pairs_.basis_size != basis_.size()) {
    fail(ErrorKind::Parameter, "pair design and basis disagree on the number of basis functions");
  }
  if (pairs_.retained() == 0 || pairs_.total_pairs <= 0) {
    fail(ErrorKind::EmptyDataset, "pair design has no positive-weight rows");
  }
  roughness_ = basis_.roughness_matrix();
  grams_ = basis_.interval_grams();
  const double n0 = normalizer();
  const Eigen::MatrixXd xs = pairs_.design.array().colwise() * pairs_.weight.array().sqrt();
  xtwx_.noalias() = xs.transpose() * xs;
  xtwx_ /= n0;
  xtwy_.noalias() = pairs_.design.transpose() * pairs_.weight.cwiseProduct(pairs_.response);
  xtwy_ /= n0;
}

Eigen::MatrixXd FitProblem::roughness_penalty(double rho0, double rho1) const {
  const int l = basis_.size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  p.topLeftCorner(l, l) = rho0 * roughness_;
  p.bottomRightCorner(l, l) = rho1 * roughness_;
  return p;
}

Eigen::VectorXd initial_gamma(const FitProblem& problem, const FitConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXd a = problem.weighted_gram() + problem.roughness_penalty(cfg.rho0, cfg.rho1);
  return solve_spd(a, problem.weighted_cross());
}

StepResult irls_step(const FitProblem& problem, const Eigen::VectorXd& gamma_prev,
                     std::span<const int> active, const FitConfig& cfg) {
  if (gamma_prev.size() != problem.columns()) {
    fail(ErrorKind::Parameter, "gamma length must equal 2L");
  }
  if (!gamma_prev.allFinite()) fail(ErrorKind::Numeric, "non-finite coefficient iterate");
  const auto sys = assemble(problem, gamma_prev, cfg);
  const Eigen::MatrixXd a = restrict(sys.a, active);
  const Eigen::VectorXd b = restrict(sys.b, active);
  const Eigen::VectorXd x = solve_spd(a, b);

  StepResult out;
  out.gamma = Eigen::VectorXd::Zero(problem.columns());
  for (std::size_t i = 0; i < active.size(); ++i) out.gamma[active[i]] = x[static_cast<Eigen::Index>(i)];
  out.residual = defect(a, x, b);
  return out;
}

FitResult fit(const FitProblem& problem, const FitConfig& cfg) {
  cfg.validate();
  const int l = problem.basis().size();
  FitResult res;
  res.basis = problem.basis();
  res.active = all_columns(problem.columns());
  Eigen::VectorXd gamma = initial_gamma(problem, cfg);
  // Shrinking exists to keep the LQA system invertible; without a sparseness
  // penalty there is nothing to shrink.
  const bool shrink = cfg.scad.lambda > 0.0 && cfg.shrink_eps > 0.0;

  for (int q = 1; q <= cfg.max_iter; ++q) {
    auto step = irls_step(problem, gamma, res.active, cfg);
    Eigen::VectorXd next = std::move(step.gamma);
    if (shrink) {
      const double thr = cfg.shrink_eps * std::max(1.0, next.tail(l).cwiseAbs().maxCoeff());
      std::vector<int> kept;
      kept.reserve(res.active.size());
      for (int idx : res.active) {
        if (idx >= l && std::abs(next[idx]) < thr) {
          next[idx] = 0.0;
        } else {
          kept.push_back(idx);
        }
      }
      res.active = std::move(kept);
    }
    const double change = (next - gamma).norm() / (gamma.norm() + 1e-12);
    gamma = std::move(next);
    res.iterations = q;
    res.residual = step.residual;
    if (change <= cfg.tol) {
      res.converged = true;
      break;
    }
  }
  res.gamma = std::move(gamma);
  return res;
}

double fixed_point_defect(const FitProblem& problem, const FitResult& result,
                          const FitConfig& cfg) {
  const auto sys = assemble(problem, result.gamma, cfg);
  const Eigen::MatrixXd a = restrict(sys.a, result.active);
  const Eigen::VectorXd b = restrict(sys.b, result.active);
  return defect(a, restrict(result.gamma, result.active), b);
}

Eigen::VectorXd initial_gamma(const PairDesign& pairs, const FitConfig& cfg,
                              const SplineBasis& basis) {
  return initial_gamma(FitProblem(pairs, basis), cfg);
}

StepResult irls_step(const PairDesign& pairs, const Eigen::VectorXd& gamma_prev,
                     const FitConfig& cfg, const SplineBasis& basis) {
  const FitProblem problem(pairs, basis);
  const auto active = all_columns(problem.columns());
  return irls_step(problem, gamma_prev, active, cfg);
}

FitResult fit(const PairDesign& pairs, const FitConfig& cfg, const SplineBasis& basis) {
  return fit(FitProblem(pairs, basis), cfg);
}

}  // namespace locker
