#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "locker/error.hpp"
#include "locker/linkfam.hpp"

using namespace locker;
using Catch::Approx;

namespace {
const Family kGauss(FamilyKind::Gaussian), kBern(FamilyKind::Bernoulli), kPois(FamilyKind::Poisson);

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
}  // namespace

TEST_CASE("mean functions") {
  CHECK(kGauss.mean(2.5) == 2.5);
  CHECK(kBern.mean(0.0) == 0.5);
  CHECK(kPois.mean(0.0) == 1.0);
  // clamped linear predictor
  CHECK(kPois.mean(100.0) == std::exp(30.0));
  CHECK(std::isfinite(kBern.mean(-1e6)));
}

TEST_CASE("names") {
  CHECK(Family::from_name("poisson") == kPois);
  CHECK(kBern.name() == "bernoulli");
  try {
    Family::from_name("gamma");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
  }
}

TEST_CASE("link derivative inverts the mean derivative") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-8, 8);
  for (const auto& fam : {kGauss, kBern, kPois}) {
    for (int i = 0; i < 200; ++i) {
      const double eta = u(rng);
      REQUIRE(fam.link_deriv(fam.mean(eta)) * fam.mean_deriv(eta) == Approx(1.0).epsilon(1e-9));
      REQUIRE(fam.mean_deriv(eta) > 0.0);
    }
    // mean derivative against central differences
    const double h = 1e-6;
    for (double eta : {-2.0, 0.3, 1.7}) {
      CHECK(fam.mean_deriv(eta) == Approx((fam.mean(eta + h) - fam.mean(eta - h)) / (2 * h)).epsilon(1e-7));
    }
  }
}

TEST_CASE("working quantities") {
  SECTION("gaussian collapses to y and unit weights") {
    const auto wq = working_quantities(kGauss, vec({0.3, -1.0}), vec({2.0, 5.0}));
    CHECK(wq.z == vec({2.0, 5.0}));
    CHECK(wq.h == vec({1.0, 1.0}));
  }
  SECTION("bernoulli") {
    const auto wq = working_quantities(kBern, vec({0.0}), vec({1.0}));
    CHECK(wq.z[0] == Approx(2.0));
    CHECK(wq.h[0] == Approx(0.25));
  }
  SECTION("poisson") {
    const auto wq = working_quantities(kPois, vec({0.0}), vec({3.0}));
    CHECK(wq.z[0] == Approx(2.0));
    CHECK(wq.h[0] == Approx(1.0));
  }
  SECTION("non-finite input") {
    CHECK_THROWS_AS(working_quantities(kBern, vec({NAN}), vec({1.0})), Error);
  }
}

TEST_CASE("deviance") {
  CHECK(deviance(kGauss, vec({1, 2, 3}), vec({1, 1, 1}), vec({1, 2, 3})) == 0.0);
  CHECK(deviance(kGauss, vec({1, 2}), vec({2, 3}), vec({0, 0})) == Approx(2 * 1 + 3 * 4));
  CHECK(deviance(kBern, vec({1}), vec({1}), vec({0.5})) == Approx(2 * std::log(2.0)).epsilon(1e-12));
  CHECK(deviance(kPois, vec({0}), vec({2}), vec({1.5})) == Approx(6.0).epsilon(1e-12));
}

TEST_CASE("deviance is nonnegative and vanishes at a perfect fit") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::poisson_distribution<int> pois(3.0);
  std::bernoulli_distribution coin(0.4);
  const int n = 50;
  Eigen::VectorXd w(n), yb(n), yp(n), mb(n), mp(n);
  for (int i = 0; i < n; ++i) {
    w[i] = u(rng);
    yb[i] = coin(rng);
    yp[i] = pois(rng);
    mb[i] = u(rng);
    mp[i] = 5 * u(rng);
  }
  CHECK(deviance(kBern, yb, w, mb) > 0.0);
  CHECK(deviance(kPois, yp, w, mp) > 0.0);
  CHECK(deviance(kBern, yb, w, yb) < 1e-8);
  CHECK(deviance(kPois, yp, w, yp) < 1e-8);
}
