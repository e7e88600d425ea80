#include "locker/longdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "locker/error.hpp"
#include "locker/io.hpp"

namespace locker {
namespace {

void sort_by_time(std::vector<Observation>& obs) {
  std::stable_sort(obs.begin(), obs.end(),
                   [](const Observation& a, const Observation& b) { return a.time < b.time; });
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

struct ChannelRows {
  std::vector<std::string> order;  // ids by first appearance
  std::unordered_map<std::string, std::vector<Observation>> rows;
};

ChannelRows read_channel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());

  ChannelRows out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (lineno == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);
    const auto where = path.string() + ":" + std::to_string(lineno);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "subject_id" || fields[1] != "time" ||
          fields[2] != "value") {
        fail(ErrorKind::Parse, where + ": expected header 'subject_id,time,value'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      fail(ErrorKind::Parse, where + ": expected 3 fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) fail(ErrorKind::Parse, where + ": empty subject_id");
    Observation obs;
    if (!parse_real(fields[1], obs.time)) {
      fail(ErrorKind::Parse, where + ": non-numeric time '" + std::string(fields[1]) + "'");
    }
    if (!parse_real(fields[2], obs.value)) {
      fail(ErrorKind::Parse, where + ": non-numeric value '" + std::string(fields[2]) + "'");
    }
    std::string id(fields[0]);
    auto [it, inserted] = out.rows.try_emplace(id);
    if (inserted) out.order.push_back(id);
    it->second.push_back(obs);
  }
  if (!header_seen) fail(ErrorKind::Parse, path.string() + ": missing header");
  return out;
}

void check_times(const Subject& s, const Domain& d) {
  auto check = [&](const std::vector<Observation>& obs, const char* what) {
    for (const auto& o : obs) {
      if (!d.contains(o.time)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "subject '" << s.id << "': " << what << " time " << o.time << " outside domain ["
            << d.lo << ", " << d.hi << "]";
        fail(ErrorKind::Domain, msg.str());
      }
    }
  };
  check(s.response, "response");
  check(s.covariate, "covariate");
}

}  // namespace

LongDataset::LongDataset(std::vector<Subject> subjects, Domain domain)
    : subjects_(std::move(subjects)), domain_(domain) {
  if (subjects_.empty()) fail(ErrorKind::EmptyDataset, "dataset has no subjects");
  if (!(std::isfinite(domain_.lo) && std::isfinite(domain_.hi)) || domain_.hi < domain_.lo) {
    fail(ErrorKind::Domain, "invalid domain");
  }
  for (auto& s : subjects_) {
    if (s.response.empty() || s.covariate.empty()) {
      fail(ErrorKind::Parameter,
           "subject '" + s.id + "' needs at least one response and one covariate observation");
    }
    sort_by_time(s.response);
    sort_by_time(s.covariate);
    check_times(s, domain_);
  }
}

LongDataset LongDataset::with_observed_domain(std::vector<Subject> subjects) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : subjects) {
    for (const auto* list : {&s.response, &s.covariate}) {
      for (const auto& o : *list) {
        lo = std::min(lo, o.time);
        hi = std::max(hi, o.time);
      }
    }
  }
  if (subjects.empty() || !std::isfinite(lo)) {
    fail(ErrorKind::EmptyDataset, "dataset has no observations");
  }
  return LongDataset(std::move(subjects), Domain{lo, hi});
}

LongDataset load_csv(const std::filesystem::path& response_path,
                     const std::filesystem::path& covariate_path, std::optional<Domain> domain) {
  auto response = read_channel(response_path);
  auto covariate = read_channel(covariate_path);

  std::vector<Subject> subjects;
  for (const auto& id : response.order) {
    auto cov = covariate.rows.find(id);
    if (cov == covariate.rows.end()) continue;
    subjects.push_back(Subject{id, std::move(response.rows[id]), std::move(cov->second)});
  }
  if (subjects.empty()) {
    fail(ErrorKind::EmptyDataset, "no subject appears in both " + response_path.string() +
                                      " and " + covariate_path.string());
  }
  if (domain) {
    if (!(domain->hi > domain->lo)) fail(ErrorKind::Domain, "explicit domain must have lo < hi");
    return LongDataset(std::move(subjects), *domain);
  }
  return LongDataset::with_observed_domain(std::move(subjects));
}

LongDataset rescale_time(const LongDataset& ds) {
  const Domain d = ds.domain();
  const double len = d.length();
  if (!(len > 0.0)) fail(ErrorKind::Domain, "degenerate domain: cannot rescale a zero-length interval");
  if (d.lo == 0.0 && d.hi == 1.0) return ds;

  auto map = [&](double t) { return std::clamp((t - d.lo) / len, 0.0, 1.0); };
  std::vector<Subject> out = ds.subjects();
  for (auto& s : out) {
    for (auto& o : s.response) o.time = map(o.time);
    for (auto& o : s.covariate) o.time = map(o.time);
  }
  return LongDataset(std::move(out), Domain{0.0, 1.0});
}

std::string to_csv(const LongDataset& ds, Channel channel) {
  std::string out = "subject_id,time,value\n";
  for (const auto& s : ds.subjects()) {
    const auto& obs = channel == Channel::Response ? s.response : s.covariate;
    for (const auto& o : obs) {
      out += s.id;
      out += ',';
      out += format_double(o.time);
      out += ',';
      out += format_double(o.value);
      out += '\n';
    }
  }
  return out;
}

}  // namespace locker
