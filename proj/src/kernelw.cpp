#include "locker/kernelw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "locker/error.hpp"

namespace locker {
namespace {

constexpr double kGaussianCutoff = 5.0;

double truncated_gaussian_norm() {
  // P(|Z| <= 5) for a standard normal.
  static const double mass = std::erf(kGaussianCutoff / std::numbers::sqrt2);
  return mass;
}

}  // namespace

KernelFamily kernel_from_name(std::string_view name) {
  if (name == "epanechnikov") return KernelFamily::Epanechnikov;
  if (name == "gaussian" || name == "truncated_gaussian") return KernelFamily::TruncatedGaussian;
  fail(ErrorKind::Usage, "unknown kernel '" + std::string(name) +
                             "' (expected epanechnikov or truncated_gaussian)");
}

std::string_view to_string(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::Epanechnikov: return "epanechnikov";
    case KernelFamily::TruncatedGaussian: return "truncated_gaussian";
  }
  return "unknown";
}

double kernel_density(KernelFamily family, double z) {
  const double a = std::abs(z);
  switch (family) {
    case KernelFamily::Epanechnikov:
      return a <= 1.0 ? 0.75 * (1.0 - z * z) : 0.0;
    case KernelFamily::TruncatedGaussian:
      if (a > kGaussianCutoff) return 0.0;
      return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * truncated_gaussian_norm());
  }
  return 0.0;
}

double kernel_weight(const KernelSpec& spec, double u) {
  if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth)) {
    fail(ErrorKind::Parameter, "kernel bandwidth must be positive");
  }
  return kernel_density(spec.family, u / spec.bandwidth) / spec.bandwidth;
}

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) fail(ErrorKind::EmptyDataset, "quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::Parameter, "quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<double> min_time_gaps(const LongDataset& ds) {
  std::vector<double> gaps;
  gaps.reserve(ds.size());
  for (const auto& s : ds.subjects()) {
    // Both lists are sorted; a merge walk finds the closest pair.
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = 0, k = 0;
    while (j < s.response.size() && k < s.covariate.size()) {
      const double t = s.response[j].time, u = s.covariate[k].time;
      best = std::min(best, std::abs(t - u));
      if (t < u) ++j; else ++k;
    }
    gaps.push_back(best);
  }
  return gaps;
}

double default_bandwidth(const LongDataset& ds) {
  if (ds.size() == 0) fail(ErrorKind::EmptyDataset, "bandwidth of an empty dataset");
  return std::max(quantile_type7(min_time_gaps(ds), 0.95), 0.01);
}

PairDesign pair_expand(const LongDataset& ds, const SplineBasis& basis, const KernelSpec& spec) {
  if (!(spec.bandwidth > 0.0)) fail(ErrorKind::Parameter, "kernel bandwidth must be positive");
  const int l = basis.size();
  const int d = basis.degree();

  struct Row {
    int subject;
    double weight;
    double response;
    double x;
    double s;
  };
  std::vector<Row> rows;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& sub = ds[i];
    for (const auto* list : {&sub.response, &sub.covariate}) {
      for (const auto& o : *list) {
        if (!basis.domain().contains(o.time)) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "subject '" << sub.id << "': time " << o.time << " outside basis domain ["
              << basis.domain().lo << ", " << basis.domain().hi << "]";
          fail(ErrorKind::Domain, msg.str());
        }
      }
    }
    total += static_cast<std::int64_t>(sub.response.size() * sub.covariate.size());
    for (const auto& r : sub.response) {
      for (const auto& c : sub.covariate) {
        const double w = kernel_weight(spec, r.time - c.time);
        if (w > 0.0) rows.push_back({static_cast<int>(i), w, r.value, c.value, c.time});
      }
    }
  }

  PairDesign out;
  out.basis_size = l;
  out.total_pairs = total;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.design = Eigen::MatrixXd::Zero(n, 2 * l);
  out.weight.resize(n);
  out.response.resize(n);
  out.subject.resize(rows.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    const auto loc = basis.local(row.s);
    out.design.row(r).segment(loc.first, d + 1) = loc.values.transpose();
    out.design.row(r).segment(l + loc.first, d + 1) = row.x * loc.values.transpose();
    out.weight[r] = row.weight;
    out.response[r] = row.response;
    out.subject[static_cast<std::size_t>(r)] = row.subject;
  }
  return out;
}

}  // namespace locker
