#include "locker/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "locker/error.hpp"

namespace locker {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) fail(ErrorKind::Parameter, "Gauss-Legendre rule needs at least one node");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

SplineBasis::SplineBasis(int degree, int interior_knots, Domain domain)
    : degree_(degree), domain_(domain) {
  if (degree < 0) fail(ErrorKind::Parameter, "spline degree must be nonnegative");
  if (interior_knots < 0) fail(ErrorKind::Parameter, "number of interior knots must be nonnegative");
  if (!(domain.hi > domain.lo)) fail(ErrorKind::Domain, "spline domain must have positive length");
  const int k = interior_knots;
  breaks_.resize(k + 2);
  for (int i = 0; i <= k + 1; ++i) {
    breaks_[i] = domain.lo + domain.length() * static_cast<double>(i) / (k + 1);
  }
  breaks_.front() = domain.lo;
  breaks_.back() = domain.hi;
  *this = SplineBasis(degree, breaks_, domain, 0);
}

SplineBasis SplineBasis::with_knots(int degree, std::vector<double> interior, Domain domain) {
  if (degree < 0) fail(ErrorKind::Parameter, "spline degree must be nonnegative");
  if (!(domain.hi > domain.lo)) fail(ErrorKind::Domain, "spline domain must have positive length");
  std::vector<double> breaks;
  breaks.reserve(interior.size() + 2);
  breaks.push_back(domain.lo);
  for (double k : interior) {
    if (!(k > breaks.back() && k < domain.hi)) {
      fail(ErrorKind::Parameter, "interior knots must be strictly increasing inside the domain");
    }
    breaks.push_back(k);
  }
  breaks.push_back(domain.hi);
  return SplineBasis(degree, std::move(breaks), domain, 0);
}

SplineBasis::SplineBasis(int degree, std::vector<double> breaks, Domain domain, int)
    : degree_(degree), domain_(domain), breaks_(std::move(breaks)) {
  knots_.reserve(breaks_.size() + 2 * degree_);
  for (int i = 0; i < degree_; ++i) knots_.push_back(domain_.lo);
  knots_.insert(knots_.end(), breaks_.begin(), breaks_.end());
  for (int i = 0; i < degree_; ++i) knots_.push_back(domain_.hi);
}

void SplineBasis::check_domain(double t) const {
  if (!domain_.contains(t)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t = " << t << " outside spline domain [" << domain_.lo << ", " << domain_.hi << "]";
    fail(ErrorKind::Domain, msg.str());
  }
}

int SplineBasis::interval_of(double t) const {
  check_domain(t);
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const int m = static_cast<int>(it - breaks_.begin()) - 1;
  return std::clamp(m, 0, intervals() - 1);
}

LocalBasis SplineBasis::local(double t, int order) const {
  return local_at_span(t, interval_of(t) + degree_, order);
}

LocalBasis SplineBasis::local_at_span(double t, int span, int order) const {
  const int d = degree_;
  LocalBasis out;
  out.first = span - d;
  out.values = Eigen::VectorXd::Zero(d + 1);
  if (order < 0) fail(ErrorKind::Parameter, "derivative order must be nonnegative");
  if (order > d) return out;

  // Nonzero basis values of degree q = d - order at the span (Cox-de Boor).
  const int q = d - order;
  std::vector<double> n(d + 1, 0.0), left(d + 1, 0.0), right(d + 1, 0.0);
  n[0] = 1.0;
  for (int j = 1; j <= q; ++j) {
    left[j] = t - knots_[span + 1 - j];
    right[j] = knots_[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }

  // Each step maps the k-th derivative of degree p-1 functions to the
  // (k+1)-th derivative of degree p functions.
  std::vector<double> next(d + 1, 0.0);
  for (int p = q + 1; p <= d; ++p) {
    for (int e = 0; e <= p; ++e) {
      const int i = span - p + e;
      double v = 0.0;
      if (e >= 1) {
        const double den = knots_[i + p] - knots_[i];
        if (den > 0.0) v += n[e - 1] / den;
      }
      if (e <= p - 1) {
        const double den = knots_[i + p + 1] - knots_[i + 1];
        if (den > 0.0) v -= n[e] / den;
      }
      next[e] = p * v;
    }
    std::copy(next.begin(), next.begin() + p + 1, n.begin());
  }
  for (int j = 0; j <= d; ++j) out.values[j] = n[j];
  return out;
}

Eigen::VectorXd SplineBasis::evaluate(double t) const {
  const auto loc = local(t, 0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size());
  b.segment(loc.first, degree_ + 1) = loc.values;
  return b;
}

Eigen::VectorXd SplineBasis::evaluate_deriv2(double t) const {
  const auto loc = local(t, 2);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size());
  b.segment(loc.first, degree_ + 1) = loc.values;
  return b;
}

Eigen::MatrixXd SplineBasis::roughness_matrix() const {
  const int l = size();
  const int d = degree_;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(l, l);
  if (d < 2) return v;
  // B'' is piecewise of degree d - 2, so the integrand has degree 2(d - 2).
  const int nodes = (2 * (d - 2) + 1 + 1) / 2 + 1;
  const auto rule = gauss_legendre(nodes);
  for (int m = 0; m < intervals(); ++m) {
    const double a = breaks_[m], b = breaks_[m + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int q = 0; q < nodes; ++q) {
      const double t = mid + half * rule.nodes[q];
      const auto loc = local_at_span(t, m + d, 2);
      v.block(loc.first, loc.first, d + 1, d + 1).noalias() +=
          (half * rule.weights[q]) * loc.values * loc.values.transpose();
    }
  }
  return 0.5 * (v + v.transpose());
}

Eigen::MatrixXd SplineBasis::interval_gram(int m) const {
  if (m < 1 || m > intervals()) {
    fail(ErrorKind::Index, "interval index " + std::to_string(m) + " outside 1.." +
                               std::to_string(intervals()));
  }
  const int l = size();
  const int d = degree_;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(l, l);
  const int nodes = d + 1;
  const auto rule = gauss_legendre(nodes);
  const double a = breaks_[m - 1], b = breaks_[m];
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int q = 0; q < nodes; ++q) {
    const double t = mid + half * rule.nodes[q];
    const auto loc = local_at_span(t, m - 1 + d, 0);
    g.block(loc.first, loc.first, d + 1, d + 1).noalias() +=
        (half * rule.weights[q]) * loc.values * loc.values.transpose();
  }
  return 0.5 * (g + g.transpose());
}

std::vector<Eigen::MatrixXd> SplineBasis::interval_grams() const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(intervals());
  for (int m = 1; m <= intervals(); ++m) out.push_back(interval_gram(m));
  return out;
}

}  // namespace locker
