#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locker/bspline.hpp"
#include "locker/kernelw.hpp"
#include "locker/linkfam.hpp"
#include "locker/longdata.hpp"
#include "locker/tuning.hpp"

namespace locker {

struct Scenario {
  std::string name;
  Family family{};
  bool sparse = false;
  int n = 200;
  double m = 20.0;  // Poisson intensity of the observation counts
  std::uint64_t seed = 1;
  bool synchronous = false;  // covariate observed at the response times

  void validate() const;
};

/// beta0(t) = cos(2 pi t); beta1(t) = sin(2 pi t), or in the sparse case
/// 2 (B_6(t) + B_7(t)) on the cubic basis with nine interior knots, which
/// vanishes outside [0.2, 0.7].
class TrueFunctions {
 public:
  explicit TrueFunctions(bool sparse);

  bool sparse() const noexcept { return sparse_; }
  double beta0(double t) const;
  double beta1(double t) const;

 private:
  bool sparse_;
  SplineBasis sparse_basis_;
};

/// How the simulated response mean is formed from eta = beta0 + beta1 X.
enum class MeanMode {
  Link,      // mean = g(eta) for the family's link
  Identity,  // mean = eta, clamped into the family's valid range
};

struct GenerationOptions {
  MeanMode mean_mode = MeanMode::Link;
};

struct SimulatedData {
  LongDataset data;
  TrueFunctions truth;
  double clamp_rate = 0.0;  // fraction of response means that hit the range guard
};

/// Degree-4 basis with 69 interior knots used for covariate trajectories.
SplineBasis covariate_basis();

SimulatedData gen_dataset(const Scenario& sc, const GenerationOptions& opts = {});

inline constexpr int kMetricGridPoints = 1001;
inline constexpr double kZeroThreshold = 1e-8;

using CurveFn = std::function<double(double)>;

/// Integrated squared error on [0, 1] by the trapezoid rule on the metric grid.
double ise(const CurveFn& estimate, const CurveFn& truth);

struct TpFn {
  std::optional<double> tp;  // absent when the truth has no zero region
  double fn = 0.0;
};

TpFn tpfn(const CurveFn& beta1_hat, const CurveFn& beta1_true);

struct BenchOptions {
  int basis_size = 13;
  int degree = 3;
  KernelFamily kernel = KernelFamily::Epanechnikov;
  double bandwidth = 0.0;  // <= 0: default_bandwidth per replicate
  TuningGrid grid = TuningGrid::defaults();
  TuneOptions tune{};
  std::vector<int> cv_sizes;  // nonempty: choose L per replicate by cross-validation
  int folds = 5;
  GenerationOptions generation{};
  std::size_t threads = 0;  // replicate-level workers; 0 = worker_count()
};

struct ReplicateResult {
  int index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double ise0 = 0.0;
  double ise1 = 0.0;
  std::optional<double> tp;
  double fn = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
  int basis_size = 0;
  double bandwidth = 0.0;
  double clamp_rate = 0.0;
  bool converged = false;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
};

Summary summarize(std::span<const double> values);

struct ScenarioReport {
  Scenario scenario;
  int replicates = 0;
  int failures = 0;
  Summary ise0;
  Summary ise1;
  std::optional<Summary> tp;
  Summary fn;
  double clamp_rate = 0.0;
  double runtime_seconds = 0.0;
  std::vector<ReplicateResult> runs;
};

struct BenchReport {
  std::vector<ScenarioReport> rows;
};

/// Runs one replicate: generate, pick the bandwidth, tune by EBIC, score.
ReplicateResult run_replicate(const Scenario& sc, int index, const BenchOptions& opts);

/// Replicate r of a scenario uses seed = scenario.seed + r.
BenchReport run_benchmark(std::span<const Scenario> scenarios, int replicates,
                          const BenchOptions& opts = {});

/// One row per scenario. Runtime is left out so reruns are byte-identical.
std::string bench_csv(const BenchReport& report);

/// Aligned text table, "mean (sd)" cells.
std::string bench_table(const BenchReport& report);

/// Named scenario sets: "gaussian", "bernoulli", "poisson" (sparse and
/// nonsparse at m = 15 and 20), "sparsity" (synchronous Gaussian at m = 15
/// and 20). Unknown names throw a usage error.
std::vector<Scenario> scenario_preset(const std::string& name, int n, std::uint64_t seed);

}  // namespace locker
