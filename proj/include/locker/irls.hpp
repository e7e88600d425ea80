#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "locker/bspline.hpp"
#include "locker/fscad.hpp"
#include "locker/kernelw.hpp"
#include "locker/linkfam.hpp"

namespace locker {

struct FitConfig {
  double rho0 = 0.0;  // roughness of the intercept function
  double rho1 = 0.0;  // roughness of the coefficient function
  ScadParams scad{};
  int max_iter = 100;
  double tol = 1e-6;         // relative change in gamma
  double shrink_eps = 1e-4;  // relative to max(1, ||gamma1||_inf)
  Family family{};

  void validate() const;
};

struct BetaValue {
  double beta0 = 0.0;
  double beta1 = 0.0;
};

struct FitResult {
  Eigen::VectorXd gamma;    // (gamma0^T, gamma1^T)^T, length 2L
  std::vector<int> active;  // indices of entries that were never shrunk
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // defect of the last linear solve
  SplineBasis basis{3, 1};

  Eigen::VectorXd gamma0() const { return gamma.head(basis.size()); }
  Eigen::VectorXd gamma1() const { return gamma.tail(basis.size()); }
};

BetaValue evaluate_beta(const FitResult& result, double t);

/// Data and penalty matrices shared by every fit on one pair design. All
/// quadratic forms are stored divided by N0, so the linear systems below are
/// the estimating equation itself. Immutable; safe to share across threads.
class FitProblem {
 public:
  FitProblem(PairDesign pairs, SplineBasis basis);

  const PairDesign& pairs() const noexcept { return pairs_; }
  const SplineBasis& basis() const noexcept { return basis_; }
  const Eigen::MatrixXd& roughness() const noexcept { return roughness_; }
  std::span<const Eigen::MatrixXd> grams() const noexcept { return grams_; }

  /// X^T W X / N0 and X^T W Y / N0.
  const Eigen::MatrixXd& weighted_gram() const noexcept { return xtwx_; }
  const Eigen::VectorXd& weighted_cross() const noexcept { return xtwy_; }

  /// diag(rho0 V, rho1 V).
  Eigen::MatrixXd roughness_penalty(double rho0, double rho1) const;

  int columns() const noexcept { return 2 * basis_.size(); }
  double normalizer() const noexcept { return static_cast<double>(pairs_.total_pairs); }

 private:
  PairDesign pairs_;
  SplineBasis basis_;
  Eigen::MatrixXd roughness_;
  std::vector<Eigen::MatrixXd> grams_;
  Eigen::MatrixXd xtwx_;
  Eigen::VectorXd xtwy_;
};

/// Kernel-weighted penalized least squares start:
/// (X^T W X + N0 V_rho)^{-1} X^T W Y.
Eigen::VectorXd initial_gamma(const FitProblem& problem, const FitConfig& cfg);

struct StepResult {
  Eigen::VectorXd gamma;
  double residual = 0.0;
};

/// One penalized IRLS update from `gamma_prev`, solving only for the columns
/// in `active` (others stay zero).
StepResult irls_step(const FitProblem& problem, const Eigen::VectorXd& gamma_prev,
                     std::span<const int> active, const FitConfig& cfg);

FitResult fit(const FitProblem& problem, const FitConfig& cfg);

/// Max-norm defect of the update equation with H, Z and U all evaluated at
/// the returned estimate, restricted to its active set.
double fixed_point_defect(const FitProblem& problem, const FitResult& result,
                          const FitConfig& cfg);

// Convenience overloads that build the problem on the fly.
Eigen::VectorXd initial_gamma(const PairDesign& pairs, const FitConfig& cfg,
                              const SplineBasis& basis);
StepResult irls_step(const PairDesign& pairs, const Eigen::VectorXd& gamma_prev,
                     const FitConfig& cfg, const SplineBasis& basis);
FitResult fit(const PairDesign& pairs, const FitConfig& cfg, const SplineBasis& basis);

}  // namespace locker
