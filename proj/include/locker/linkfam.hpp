#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "locker/kernelw.hpp"

namespace locker {

enum class FamilyKind { Gaussian, Bernoulli, Poisson };

/// Response family: mean function g (inverse link), its derivative, and the
/// derivative of the link f = g^{-1}. Bernoulli and Poisson clamp the linear
/// predictor to [-30, 30] before exponentiating.
class Family {
 public:
  constexpr Family(FamilyKind kind = FamilyKind::Gaussian) noexcept : kind_(kind) {}

  /// "gaussian" | "bernoulli" | "poisson"
  static Family from_name(std::string_view name);

  FamilyKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;

  double mean(double eta) const noexcept;        // g
  double mean_deriv(double eta) const noexcept;  // g'
  double link_deriv(double mu) const noexcept;   // f'

  constexpr bool operator==(const Family&) const = default;

 private:
  FamilyKind kind_;
};

inline constexpr double kEtaClamp = 30.0;
inline constexpr double kMeanFloor = 1e-10;

struct WorkingQuantities {
  Eigen::VectorXd z;  // working response
  Eigen::VectorXd h;  // diagonal of H = 1 / f'(g(eta))
};

WorkingQuantities working_quantities(const Family& fam, const Eigen::VectorXd& eta,
                                     const Eigen::VectorXd& y);

/// Kernel-weighted deviance over retained pair rows. The Poisson form is the
/// saturated-model deviance 2 sum w [y log(y / mu) - (y - mu)].
double deviance(const Family& fam, const PairDesign& pairs, const Eigen::VectorXd& fitted_means);

/// Same, for bare vectors.
double deviance(const Family& fam, const Eigen::VectorXd& y, const Eigen::VectorXd& weight,
                const Eigen::VectorXd& fitted_means);

}  // namespace locker
