#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "locker/bspline.hpp"

namespace locker {

struct ScadParams {
  double lambda = 0.0;
  double a = 3.7;

  void validate() const;
};

/// SCAD penalty p_lambda(v), v >= 0.
double scad(const ScadParams& p, double v);

/// p'_lambda(v), v >= 0 (right derivative at the kinks).
double scad_deriv(const ScadParams& p, double v);

/// Local quadratic approximation of the functional SCAD penalty around the
/// previous coefficient iterate.
struct LqaState {
  /// ||beta_1||_2 restricted to each breakpoint interval.
  Eigen::VectorXd interval_norms;
  /// Intervals whose norm fell below the degeneracy threshold; they add
  /// nothing to U.
  std::vector<bool> degenerate;
  /// 2L x 2L, diag(0, sum_m U_m).
  Eigen::MatrixXd u;
};

/// Norms below this are treated as exactly zero.
double lqa_norm_floor(const SplineBasis& basis);

LqaState lqa_matrix(const Eigen::VectorXd& gamma1_prev, const SplineBasis& basis,
                    const ScadParams& p);

/// Same, reusing precomputed interval Gram matrices.
LqaState lqa_matrix(const Eigen::VectorXd& gamma1_prev, const SplineBasis& basis,
                    std::span<const Eigen::MatrixXd> grams, const ScadParams& p);

}  // namespace locker
