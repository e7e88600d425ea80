#include "locker/error.hpp"

namespace locker {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::EmptyDataset: return "empty_dataset";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Index: return "index";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Benchmark: return "benchmark";
  }
  return "unknown";
}

}  // namespace locker
