#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "locker/bspline.hpp"
#include "locker/error.hpp"
#include "locker/fscad.hpp"

using namespace locker;
using Catch::Approx;

TEST_CASE("SCAD values") {
  const ScadParams p{0.5, 3.7};
  CHECK(scad(p, 0.0) == 0.0);
  CHECK(scad(p, 0.3) == Approx(0.15));
  CHECK(scad(p, 10.0) == Approx(0.5875));
  CHECK(scad_deriv(p, 0.0) == 0.5);
  CHECK(scad_deriv(p, 3.7 * 0.5 + 1) == 0.0);
  CHECK_THROWS_AS(scad(p, -1.0), Error);
  CHECK_THROWS_AS(scad_deriv(p, -1.0), Error);
  CHECK_THROWS_AS(scad(ScadParams{0.5, 2.0}, 1.0), Error);
}

TEST_CASE("SCAD is continuous and nondecreasing") {
  const ScadParams p{0.4, 3.7};
  double prev = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double v = i * 0.001;
    const double s = scad(p, v);
    REQUIRE(s >= prev - 1e-15);
    REQUIRE(std::abs(s - prev) < 1e-3);
    prev = s;
  }
}

TEST_CASE("SCAD derivative matches central differences away from kinks") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const ScadParams p{0.6, 3.7};
  const double h = 1e-6;
  int checked = 0;
  while (checked < 500) {
    const double v = u(rng);
    if (std::abs(v - p.lambda) < 1e-3 || std::abs(v - p.a * p.lambda) < 1e-3 || v < 2 * h) continue;
    const double fd = (scad(p, v + h) - scad(p, v - h)) / (2 * h);
    REQUIRE(std::abs(fd - scad_deriv(p, v)) < 1e-6);
    ++checked;
  }
}

TEST_CASE("LQA matrix") {
  const SplineBasis b(3, 9);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  Eigen::VectorXd g(13);
  for (auto& e : g) e = z(rng);

  SECTION("lambda = 0 gives zero") {
    const auto st = lqa_matrix(g, b, {0.0, 3.7});
    CHECK(st.u.cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("plateau gives zero") {
    const auto st0 = lqa_matrix(g, b, {1e-3, 3.7});
    const double c = std::sqrt(10.0);
    REQUIRE(st0.interval_norms.minCoeff() * c > 3.7 * 1e-3);
    CHECK(st0.u.cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("structure") {
    const auto st = lqa_matrix(g, b, {2.0, 3.7});
    CHECK(st.u.rows() == 26);
    CHECK(st.u.topLeftCorner(13, 13).cwiseAbs().maxCoeff() == 0.0);
    CHECK(st.u.topRightCorner(13, 13).cwiseAbs().maxCoeff() == 0.0);
    CHECK((st.u - st.u.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    for (int m = 0; m < 10; ++m) {
      CHECK(st.interval_norms[m] == Approx(std::sqrt(g.dot(b.interval_gram(m + 1) * g))));
    }
  }
  SECTION("gradient identity") {
    const ScadParams p{0.8, 3.7};
    const double c = std::sqrt(10.0);
    const auto st = lqa_matrix(g, b, p);
    // objective sum_m c p'(c n0_m) ||beta_m||^2 / (2 n0_m) with n0 frozen at g
    auto objective = [&](const Eigen::VectorXd& x) {
      double s = 0.0;
      for (int m = 0; m < 10; ++m) {
        const double n0 = st.interval_norms[m];
        s += c * scad_deriv(p, c * n0) * x.dot(b.interval_gram(m + 1) * x) / (2 * n0);
      }
      return s;
    };
    const Eigen::VectorXd analytic = 2.0 * st.u.bottomRightCorner(13, 13) * g;
    const double h = 1e-6;
    for (int i = 0; i < 13; ++i) {
      Eigen::VectorXd up = g, dn = g;
      up[i] += h;
      dn[i] -= h;
      CHECK(std::abs((objective(up) - objective(dn)) / (2 * h) - analytic[i]) < 1e-6);
    }
  }
  SECTION("degenerate intervals contribute nothing") {
    Eigen::VectorXd sparse = Eigen::VectorXd::Zero(13);
    sparse[6] = 1.0;  // support [0.3, 0.7]
    const auto st = lqa_matrix(sparse, b, {0.5, 3.7});
    CHECK(st.degenerate[0]);
    CHECK(st.degenerate[1]);
    CHECK_FALSE(st.degenerate[4]);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(13, 13);
    const double c = std::sqrt(10.0);
    for (int m = 0; m < 10; ++m) {
      if (st.degenerate[m]) continue;
      const double n = st.interval_norms[m];
      expected += c * scad_deriv({0.5, 3.7}, c * n) / (2 * n) * b.interval_gram(m + 1);
    }
    CHECK((st.u.bottomRightCorner(13, 13) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fSCAD interval approximation is exact for piecewise constants") {
  // beta_1 constant on each breakpoint interval; degree-0 basis represents it
  const SplineBasis b(0, 9);
  Eigen::VectorXd g(10);
  for (int i = 0; i < 10; ++i) g[i] = (i % 3 == 0) ? 0.0 : 0.1 * i - 0.4;
  const ScadParams p{0.3, 3.7};
  double approx = 0.0;
  for (int m = 1; m <= 10; ++m) {
    approx += scad(p, std::sqrt(10.0 * g.dot(b.interval_gram(m) * g)));
  }
  approx *= 0.1;  // T / (K + 1)
  // integral of p(|beta_1(t)|) by a fine midpoint rule
  double integral = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    integral += scad(p, std::abs(b.evaluate(t).dot(g))) / n;
  }
  CHECK(approx == Approx(integral).epsilon(1e-9));
}
