#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "locker/longdata.hpp"

namespace locker {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

/// Nonzero basis values at one point: entries `values[j]` belong to basis
/// function `first + j`, j = 0..degree.
struct LocalBasis {
  int first = 0;
  Eigen::VectorXd values;
};

/// Clamped B-spline basis of degree d with K interior knots on a closed
/// domain, L = K + d + 1 functions. The last function takes the value 1 at
/// the right endpoint so the basis is defined on the whole closed interval.
class SplineBasis {
 public:
  /// Equally spaced interior knots.
  SplineBasis(int degree, int interior_knots, Domain domain = {});

  /// Explicit, strictly increasing interior knots inside (lo, hi).
  static SplineBasis with_knots(int degree, std::vector<double> interior, Domain domain = {});

  int degree() const noexcept { return degree_; }
  int interior_knots() const noexcept { return static_cast<int>(breaks_.size()) - 2; }
  int size() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
  int intervals() const noexcept { return static_cast<int>(breaks_.size()) - 1; }
  const Domain& domain() const noexcept { return domain_; }

  /// Full clamped knot vector, length L + d + 1.
  const std::vector<double>& knots() const noexcept { return knots_; }
  /// Distinct breakpoints tau_0 < ... < tau_{K+1}.
  const std::vector<double>& breaks() const noexcept { return breaks_; }

  /// Zero-based index of the breakpoint interval holding t (the last interval
  /// is closed on the right).
  int interval_of(double t) const;

  Eigen::VectorXd evaluate(double t) const;
  Eigen::VectorXd evaluate_deriv2(double t) const;

  /// Derivative of order `order` (0 <= order) of the d + 1 functions that are
  /// nonzero on the interval holding t.
  LocalBasis local(double t, int order = 0) const;

  /// Integral of B''(t) B''(t)^T over the domain.
  Eigen::MatrixXd roughness_matrix() const;

  /// Integral of B(t) B(t)^T over breakpoint interval m, 1 <= m <= K + 1.
  Eigen::MatrixXd interval_gram(int m) const;

  /// All K + 1 interval Gram matrices in order.
  std::vector<Eigen::MatrixXd> interval_grams() const;

  bool operator==(const SplineBasis&) const = default;

 private:
  SplineBasis(int degree, std::vector<double> breaks, Domain domain, int);

  LocalBasis local_at_span(double t, int span, int order) const;
  void check_domain(double t) const;

  int degree_;
  Domain domain_;
  std::vector<double> breaks_;
  std::vector<double> knots_;
};

}  // namespace locker
