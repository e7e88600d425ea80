#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "locker/bspline.hpp"
#include "locker/longdata.hpp"

namespace locker {

enum class KernelFamily { Epanechnikov, TruncatedGaussian };

KernelFamily kernel_from_name(std::string_view name);
std::string_view to_string(KernelFamily family) noexcept;

struct KernelSpec {
  KernelFamily family = KernelFamily::Epanechnikov;
  double bandwidth = 0.01;
};

/// Standardized kernel density K(z).
double kernel_density(KernelFamily family, double z);

/// K_h(u) = K(u / h) / h.
double kernel_weight(const KernelSpec& spec, double u);

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7).
double quantile_type7(std::vector<double> values, double p);

/// Per-subject minimum distance between response and covariate times.
std::vector<double> min_time_gaps(const LongDataset& ds);

/// max(Quantile_0.95 of the per-subject minimum gaps, 0.01).
double default_bandwidth(const LongDataset& ds);

/// Kernel-weighted expansion of every (response, covariate) observation pair
/// of every subject. Only rows with positive weight are stored; `total_pairs`
/// still counts all of them.
struct PairDesign {
  /// Rows x = (B(S)^T, X(S) B(S)^T), 2L columns.
  Eigen::MatrixXd design;
  Eigen::VectorXd weight;
  Eigen::VectorXd response;
  std::vector<int> subject;
  std::int64_t total_pairs = 0;  // N0
  int basis_size = 0;            // L

  std::int64_t retained() const noexcept { return static_cast<std::int64_t>(weight.size()); }  // n0
  int columns() const noexcept { return 2 * basis_size; }
};

PairDesign pair_expand(const LongDataset& ds, const SplineBasis& basis, const KernelSpec& spec);

}  // namespace locker
