#pragma once

#include <filesystem>
#include <string>

#include "locker/error.hpp"
#include "locker/irls.hpp"

namespace locker {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 2,
  kExitUsage = 3,
  kExitBenchmark = 4,
  kExitNumeric = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Entry point shared by the `locker` binary and the tests. Errors are
/// reported on stderr as one JSON object per line.
int run_cli(int argc, const char* const* argv);

inline constexpr int kCurveGridPoints = 201;

/// t, beta0_hat, beta1_hat on the 201-point grid over the fitted domain.
std::string curves_csv(const FitResult& result);

/// Rebuilds the fitted coefficient functions from a fit_summary.json.
FitResult load_fit_summary(const std::filesystem::path& path);

}  // namespace locker
