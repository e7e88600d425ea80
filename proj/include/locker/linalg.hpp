#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace locker {

/// Solves A x = b for symmetric positive definite A by Cholesky. If the
/// factorization fails, retries once with 1e-10 * (trace / n) added to the
/// diagonal. Throws ErrorKind::Singular when A has an all-zero row (an
/// unidentified coefficient) or both attempts fail.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Same, with a matrix right-hand side.
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Principal submatrix / subvector on the given indices.
Eigen::MatrixXd restrict(const Eigen::MatrixXd& m, std::span<const int> idx);
Eigen::VectorXd restrict(const Eigen::VectorXd& v, std::span<const int> idx);

}  // namespace locker
