#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "locker/irls.hpp"
#include "locker/kernelw.hpp"
#include "locker/longdata.hpp"

namespace locker {

inline constexpr double kDevianceFloor = 1e-12;

struct EbicBreakdown {
  double dev = 0.0;
  double df = 0.0;
  std::int64_t n0 = 0;
  double nu = 0.5;
  double score = 0.0;
};

/// log(max(dev, floor)) + df log(n0) / n0 + nu df log(2L) / n0, where
/// `coefficients` is 2L.
double ebic_score(double dev, double df, std::int64_t n0, int coefficients, double nu);

/// tr{X_A (X_A^T W X_A + N0 V_rho,A)^{-1} X_A^T W}, with W over all retained
/// rows and only the columns in `active` kept.
double degrees_of_freedom(const FitProblem& problem, std::span<const int> active, double rho0,
                          double rho1);

EbicBreakdown ebic(const FitResult& result, const FitProblem& problem, const FitConfig& cfg,
                   double nu = 0.5);

struct TuningGrid {
  std::vector<double> rho;
  std::vector<double> lambda;

  /// rho in {1e-6, ..., 1e-1}; lambda in {0} and 9 log-spaced values on [1e-4, 1].
  static TuningGrid defaults();
};

struct TuneOptions {
  FitConfig base{};      // family, SCAD shape, iteration controls
  double nu = 0.5;
  std::size_t threads = 0;  // 0 = worker_count()
};

struct GridCell {
  double rho = 0.0;
  double lambda = 0.0;
  bool ok = false;
  EbicBreakdown ebic{};
  int iterations = 0;
  bool converged = false;
  std::size_t active_size = 0;
  std::string error;
};

struct RhoLambdaSelection {
  double rho = 0.0;
  double lambda = 0.0;
  EbicBreakdown best{};
  FitResult fit;
  std::vector<GridCell> table;  // rho-major order
};

/// Fits every (rho, lambda) pair with rho0 = rho1 = rho and returns the EBIC
/// minimizer; ties go to the larger lambda, then the larger rho.
RhoLambdaSelection select_rho_lambda(const FitProblem& problem, const Family& fam,
                                     std::span<const double> rho_grid,
                                     std::span<const double> lambda_grid,
                                     const TuneOptions& opts = {});

/// Subject-level fold labels, a deterministic function of (subject id, seed)
/// that does not depend on subject order.
std::vector<int> assign_folds(const LongDataset& ds, int folds, std::uint64_t seed);

struct CvOptions {
  int degree = 3;
  KernelSpec kernel{};  // bandwidth <= 0 means default_bandwidth(ds)
  std::uint64_t seed = 1;
  TuningGrid grid = TuningGrid::defaults();
  TuneOptions tune{};
};

struct CvRow {
  int basis_size = 0;
  double score = 0.0;  // mean held-out deviance over used folds
  int folds_used = 0;
  std::vector<double> fold_scores;
  std::vector<double> fold_rho;
  std::vector<double> fold_lambda;
  std::vector<std::string> warnings;
};

struct LSelection {
  int basis_size = 0;
  std::vector<CvRow> table;
};

LSelection select_L(const LongDataset& ds, const Family& fam, std::span<const int> candidate_sizes,
                    int folds, const CvOptions& opts = {});

std::string ebic_table_csv(const RhoLambdaSelection& sel);
std::string cv_table_csv(const LSelection& sel);

}  // namespace locker
