#include "locker/linalg.hpp"

#include <cmath>

#include "locker/error.hpp"

namespace locker {
namespace {

constexpr double kJitter = 1e-10;

template <class Rhs>
Rhs solve_impl(const Eigen::MatrixXd& a, const Rhs& b) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) fail(ErrorKind::Parameter, "linear system shape mismatch");
  if (n == 0) return Rhs(b);
  if (!a.allFinite() || !b.allFinite()) fail(ErrorKind::Numeric, "non-finite linear system");

  for (Eigen::Index i = 0; i < n; ++i) {
    if (a.row(i).cwiseAbs().maxCoeff() == 0.0) {
      fail(ErrorKind::Singular,
           "singular system: coefficient " + std::to_string(i) +
               " is not identified by the data or the penalty; increase rho or reduce L");
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) {
    Rhs x = llt.solve(b);
    if (x.allFinite()) return x;
  }
  const double jitter = kJitter * a.trace() / static_cast<double>(n);
  Eigen::MatrixXd aj = a;
  aj.diagonal().array() += jitter;
  llt.compute(aj);
  if (llt.info() == Eigen::Success) {
    Rhs x = llt.solve(b);
    if (x.allFinite()) return x;
  }
  fail(ErrorKind::Singular,
       "singular system after diagonal jitter; increase rho or reduce the number of basis functions");
}

}  // namespace

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return solve_impl(a, b);
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return solve_impl(a, b);
}

Eigen::MatrixXd restrict(const Eigen::MatrixXd& m, std::span<const int> idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(idx[i], idx[j]);
  }
  return out;
}

Eigen::VectorXd restrict(const Eigen::VectorXd& v, std::span<const int> idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[idx[i]];
  return out;
}

}  // namespace locker
