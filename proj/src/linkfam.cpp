#include "locker/linkfam.hpp"

#include <algorithm>
#include <cmath>

#include "locker/error.hpp"

namespace locker {
namespace {

double clamp_eta(double eta) { return std::clamp(eta, -kEtaClamp, kEtaClamp); }

double xlogy_ratio(double y, double mu) { return y > 0.0 ? y * std::log(y / mu) : 0.0; }

}  // namespace

Family Family::from_name(std::string_view name) {
  if (name == "gaussian") return Family(FamilyKind::Gaussian);
  if (name == "bernoulli") return Family(FamilyKind::Bernoulli);
  if (name == "poisson") return Family(FamilyKind::Poisson);
  fail(ErrorKind::Usage, "unknown family '" + std::string(name) +
                             "' (expected gaussian, bernoulli or poisson)");
}

std::string_view Family::name() const noexcept {
  switch (kind_) {
    case FamilyKind::Gaussian: return "gaussian";
    case FamilyKind::Bernoulli: return "bernoulli";
    case FamilyKind::Poisson: return "poisson";
  }
  return "unknown";
}

double Family::mean(double eta) const noexcept {
  switch (kind_) {
    case FamilyKind::Gaussian: return eta;
    case FamilyKind::Bernoulli: return 1.0 / (1.0 + std::exp(-clamp_eta(eta)));
    case FamilyKind::Poisson: return std::exp(clamp_eta(eta));
  }
  return eta;
}

double Family::mean_deriv(double eta) const noexcept {
  switch (kind_) {
    case FamilyKind::Gaussian: return 1.0;
    case FamilyKind::Bernoulli: {
      const double mu = mean(eta);
      return mu * (1.0 - mu);
    }
    case FamilyKind::Poisson: return mean(eta);
  }
  return 1.0;
}

double Family::link_deriv(double mu) const noexcept {
  switch (kind_) {
    case FamilyKind::Gaussian: return 1.0;
    case FamilyKind::Bernoulli: return 1.0 / (mu * (1.0 - mu));
    case FamilyKind::Poisson: return 1.0 / mu;
  }
  return 1.0;
}

WorkingQuantities working_quantities(const Family& fam, const Eigen::VectorXd& eta,
                                     const Eigen::VectorXd& y) {
  if (eta.size() != y.size()) fail(ErrorKind::Parameter, "eta and y differ in length");
  WorkingQuantities out;
  out.z.resize(eta.size());
  out.h.resize(eta.size());
  for (Eigen::Index r = 0; r < eta.size(); ++r) {
    if (!std::isfinite(eta[r]) || !std::isfinite(y[r])) {
      fail(ErrorKind::Numeric, "non-finite linear predictor or response");
    }
    const double mu = fam.mean(eta[r]);
    const double fp = fam.link_deriv(mu);
    out.z[r] = eta[r] + (y[r] - mu) * fp;
    out.h[r] = 1.0 / fp;
    if (!std::isfinite(out.z[r]) || !(out.h[r] > 0.0)) {
      fail(ErrorKind::Numeric, "non-finite working response or weight");
    }
  }
  return out;
}

double deviance(const Family& fam, const Eigen::VectorXd& y, const Eigen::VectorXd& weight,
                const Eigen::VectorXd& fitted_means) {
  if (y.size() != fitted_means.size() || y.size() != weight.size()) {
    fail(ErrorKind::Parameter, "fitted means not aligned with pair rows");
  }
  double dev = 0.0;
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    const double w = weight[r];
    double mu = fitted_means[r];
    if (!std::isfinite(mu)) fail(ErrorKind::Numeric, "non-finite fitted mean");
    switch (fam.kind()) {
      case FamilyKind::Gaussian:
        dev += w * (y[r] - mu) * (y[r] - mu);
        break;
      case FamilyKind::Bernoulli:
        mu = std::clamp(mu, kMeanFloor, 1.0 - kMeanFloor);
        dev += 2.0 * w * (xlogy_ratio(y[r], mu) + xlogy_ratio(1.0 - y[r], 1.0 - mu));
        break;
      case FamilyKind::Poisson:
        mu = std::max(mu, kMeanFloor);
        dev += 2.0 * w * (xlogy_ratio(y[r], mu) - (y[r] - mu));
        break;
    }
  }
  if (!std::isfinite(dev)) fail(ErrorKind::Numeric, "non-finite deviance");
  return dev;
}

double deviance(const Family& fam, const PairDesign& pairs, const Eigen::VectorXd& fitted_means) {
  return deviance(fam, pairs.response, pairs.weight, fitted_means);
}

}  // namespace locker
