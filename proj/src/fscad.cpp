#include "locker/fscad.hpp"

#include <cmath>

#include "locker/error.hpp"

namespace locker {

void ScadParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorKind::Parameter, "lambda must be >= 0");
  if (!(a > 2.0) || !std::isfinite(a)) fail(ErrorKind::Parameter, "SCAD shape a must exceed 2");
}

double scad(const ScadParams& p, double v) {
  p.validate();
  if (!(v >= 0.0)) fail(ErrorKind::Parameter, "SCAD argument must be nonnegative");
  const double lam = p.lambda;
  if (v <= lam) return lam * v;
  if (v <= p.a * lam) return (2.0 * p.a * lam * v - v * v - lam * lam) / (2.0 * (p.a - 1.0));
  return lam * lam * (p.a + 1.0) / 2.0;
}

double scad_deriv(const ScadParams& p, double v) {
  p.validate();
  if (!(v >= 0.0)) fail(ErrorKind::Parameter, "SCAD argument must be nonnegative");
  const double lam = p.lambda;
  if (v <= lam) return lam;
  if (v <= p.a * lam) return (p.a * lam - v) / (p.a - 1.0);
  return 0.0;
}

double lqa_norm_floor(const SplineBasis& basis) {
  return 1e-8 * std::sqrt(basis.domain().length() / basis.intervals());
}

LqaState lqa_matrix(const Eigen::VectorXd& gamma1_prev, const SplineBasis& basis,
                    const ScadParams& p) {
  const auto grams = basis.interval_grams();
  return lqa_matrix(gamma1_prev, basis, grams, p);
}

LqaState lqa_matrix(const Eigen::VectorXd& gamma1_prev, const SplineBasis& basis,
                    std::span<const Eigen::MatrixXd> grams, const ScadParams& p) {
  p.validate();
  const int l = basis.size();
  const int intervals = basis.intervals();
  if (gamma1_prev.size() != l) fail(ErrorKind::Parameter, "gamma1 length must equal basis size");
  if (static_cast<int>(grams.size()) != intervals) {
    fail(ErrorKind::Parameter, "one Gram matrix per breakpoint interval required");
  }

  const double scale = std::sqrt(intervals / basis.domain().length());
  const double floor = lqa_norm_floor(basis);

  LqaState st;
  st.interval_norms.resize(intervals);
  st.degenerate.assign(static_cast<std::size_t>(intervals), false);
  st.u = Eigen::MatrixXd::Zero(2 * l, 2 * l);
  auto block = st.u.bottomRightCorner(l, l);
  for (int m = 0; m < intervals; ++m) {
    const auto& t = grams[static_cast<std::size_t>(m)];
    const double norm = std::sqrt(std::max(0.0, gamma1_prev.dot(t * gamma1_prev)));
    st.interval_norms[m] = norm;
    if (norm < floor) {
      st.degenerate[static_cast<std::size_t>(m)] = true;
      continue;
    }
    const double coef = scale * scad_deriv(p, scale * norm) / (2.0 * norm);
    if (coef != 0.0) block.noalias() += coef * t;
  }
  return st;
}

}  // namespace locker
