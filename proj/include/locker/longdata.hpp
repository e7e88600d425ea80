#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace locker {

/// Closed time interval [lo, hi].
struct Domain {
  double lo = 0.0;
  double hi = 1.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
  bool operator==(const Domain&) const = default;
};

struct Observation {
  double time = 0.0;
  double value = 0.0;
  bool operator==(const Observation&) const = default;
};

/// One subject's asynchronous record: response and covariate are observed
/// on their own, unrelated time grids.
struct Subject {
  std::string id;
  std::vector<Observation> response;
  std::vector<Observation> covariate;

  bool operator==(const Subject&) const = default;
};

/// Immutable collection of subjects on a common domain. Observation lists are
/// sorted by time on construction; every subject must carry at least one
/// response and one covariate observation, all inside the domain.
class LongDataset {
 public:
  LongDataset(std::vector<Subject> subjects, Domain domain);

  /// Uses [min observed time, max observed time] as the domain.
  static LongDataset with_observed_domain(std::vector<Subject> subjects);

  const std::vector<Subject>& subjects() const noexcept { return subjects_; }
  const Domain& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return subjects_.size(); }
  const Subject& operator[](std::size_t i) const { return subjects_[i]; }

  bool operator==(const LongDataset&) const = default;

 private:
  std::vector<Subject> subjects_;
  Domain domain_;
};

/// Reads the two-file `subject_id,time,value` layout. Subjects present in only
/// one file are dropped. When `domain` is given, every time must lie inside it.
LongDataset load_csv(const std::filesystem::path& response_path,
                     const std::filesystem::path& covariate_path,
                     std::optional<Domain> domain = std::nullopt);

/// Affinely maps all times so the domain becomes [0, 1].
LongDataset rescale_time(const LongDataset& ds);

enum class Channel { Response, Covariate };

/// Renders one channel in the CSV schema read by load_csv.
std::string to_csv(const LongDataset& ds, Channel channel);

}  // namespace locker
