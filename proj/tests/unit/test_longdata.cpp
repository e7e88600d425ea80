#include <catch_amalgamated.hpp>

#include "locker/error.hpp"
#include "locker/longdata.hpp"
#include "test_support.hpp"

using namespace locker;
using Catch::Matchers::ContainsSubstring;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("load_csv keeps subjects present in both files") {
  auto dir = testing::scratch_dir("longdata_intersection");
  testing::write_text(dir / "r.csv", "subject_id,time,value\nA,0.1,1\nB,0.2,2\n");
  testing::write_text(dir / "c.csv", "subject_id,time,value\nA,0.3,5\n");
  const auto ds = load_csv(dir / "r.csv", dir / "c.csv");
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].id == "A");
}

TEST_CASE("load_csv counts rows per subject") {
  auto dir = testing::scratch_dir("longdata_counts");
  testing::write_text(dir / "r.csv", "subject_id,time,value\nA,0.5,1\nA,0.1,2\n");
  testing::write_text(dir / "c.csv", "subject_id,time,value\nA,0.3,5\nA,0.2,6\nA,0.9,7\n");
  const auto ds = load_csv(dir / "r.csv", dir / "c.csv");
  CHECK(ds[0].response.size() == 2);
  CHECK(ds[0].covariate.size() == 3);
  // sorted by time
  CHECK(ds[0].response[0].time == 0.1);
  CHECK(ds.domain() == Domain{0.1, 0.9});
}

TEST_CASE("load_csv reports the offending line") {
  auto dir = testing::scratch_dir("longdata_parse");
  testing::write_text(dir / "r.csv", "subject_id,time,value\nA,0.1,1\nA, 0.5, abc\n");
  testing::write_text(dir / "c.csv", "subject_id,time,value\nA,0.3,5\n");
  try {
    load_csv(dir / "r.csv", dir / "c.csv");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK_THAT(e.what(), ContainsSubstring("r.csv:3"));
  }
  testing::write_text(dir / "bad_arity.csv", "subject_id,time,value\nA,0.1\n");
  CHECK(kind_of([&] { load_csv(dir / "bad_arity.csv", dir / "c.csv"); }) == ErrorKind::Parse);
  testing::write_text(dir / "no_header.csv", "A,0.1,1\n");
  CHECK(kind_of([&] { load_csv(dir / "no_header.csv", dir / "c.csv"); }) == ErrorKind::Parse);
}

TEST_CASE("load_csv error classes") {
  auto dir = testing::scratch_dir("longdata_errors");
  testing::write_text(dir / "r.csv", "subject_id,time,value\nA,0.1,1\n");
  testing::write_text(dir / "c.csv", "subject_id,time,value\nB,0.3,5\n");
  CHECK(kind_of([&] { load_csv(dir / "r.csv", dir / "missing.csv"); }) == ErrorKind::Io);
  CHECK(kind_of([&] { load_csv(dir / "r.csv", dir / "c.csv"); }) == ErrorKind::EmptyDataset);
  testing::write_text(dir / "c2.csv", "subject_id,time,value\nA,3.0,5\n");
  CHECK(kind_of([&] { load_csv(dir / "r.csv", dir / "c2.csv", Domain{0, 1}); }) == ErrorKind::Domain);
}

TEST_CASE("load_csv tolerates BOM, spaces and blank lines") {
  auto dir = testing::scratch_dir("longdata_lenient");
  testing::write_text(dir / "r.csv", "\xEF\xBB\xBFsubject_id,time,value\r\n A , 0.1 , 1 \r\n\r\n");
  testing::write_text(dir / "c.csv", "subject_id,time,value\nA,0.3,5\n");
  const auto ds = load_csv(dir / "r.csv", dir / "c.csv");
  CHECK(ds[0].id == "A");
  CHECK(ds[0].response[0].value == 1.0);
}

TEST_CASE("rescale_time maps the domain onto [0, 1]") {
  std::vector<Subject> s{{"A", {{2, 1}, {4, 2}}, {{6, 3}}}};
  const LongDataset ds(s, {2, 6});
  const auto r = rescale_time(ds);
  CHECK(r.domain() == Domain{0, 1});
  CHECK(r[0].response[0].time == 0.0);
  CHECK(r[0].response[1].time == 0.5);
  CHECK(r[0].covariate[0].time == 1.0);
}

TEST_CASE("rescale_time leaves unit-domain data alone") {
  std::vector<Subject> s{{"A", {{0.2, 1}}, {{0.7, 3}}}};
  const LongDataset ds(s, {0, 1});
  CHECK(rescale_time(ds) == ds);
}

TEST_CASE("rescale_time rejects a degenerate domain") {
  std::vector<Subject> s{{"A", {{0.5, 1}}, {{0.5, 3}}}};
  const auto ds = LongDataset::with_observed_domain(s);
  CHECK(kind_of([&] { rescale_time(ds); }) == ErrorKind::Domain);
}

TEST_CASE("to_csv round-trips through load_csv") {
  std::mt19937_64 rng(3);
  const auto ds = testing::random_dataset(rng, 7, 5);
  auto dir = testing::scratch_dir("longdata_roundtrip");
  testing::write_text(dir / "r.csv", to_csv(ds, Channel::Response));
  testing::write_text(dir / "c.csv", to_csv(ds, Channel::Covariate));
  const auto back = load_csv(dir / "r.csv", dir / "c.csv", Domain{0, 1});
  CHECK(back == ds);
}

TEST_CASE("dataset invariants") {
  CHECK(kind_of([] { LongDataset({}, {0, 1}); }) == ErrorKind::EmptyDataset);
  std::vector<Subject> empty_cov{{"A", {{0.5, 1}}, {}}};
  CHECK(kind_of([&] { LongDataset(empty_cov, {0, 1}); }) == ErrorKind::Parameter);
  std::vector<Subject> outside{{"A", {{1.5, 1}}, {{0.5, 1}}}};
  CHECK(kind_of([&] { LongDataset(outside, {0, 1}); }) == ErrorKind::Domain);
}
