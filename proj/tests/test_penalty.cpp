#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "varma/penalty.hpp"
#include "varma/rng.hpp"

using namespace varma;

namespace {

double soft(double x, double t) {
  return std::copysign(std::max(std::abs(x) - t, 0.0), x);
}

Eigen::RowVectorXd random_row(int n, std::uint64_t seed, double scale = 1.0) {
  GaussianSampler gen(seed);
  Eigen::RowVectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * gen.standard_normal();
  return v;
}

}  // namespace

TEST_CASE("penalty_value: l1 sums absolute entries") {
  Eigen::MatrixXd b(2, 4);
  b << 1, -2, 3, -4, 0.5, 0, -0.5, 1;
  CHECK(penalty_value(PenaltyKind::l1, b, 2) ==
        doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("penalty_value: hlag sums suffix-group norms per profile") {
  // single series, two lags, profile (3, -4):
  // group at lag 1 = |(3,-4)| = 5, group at lag 2 = |-4| = 4
  Eigen::MatrixXd b(1, 2);
  b << 3, -4;
  CHECK(penalty_value(PenaltyKind::hlag, b, 2) ==
        doctest::Approx(9.0).epsilon(1e-12));

  // with one lag the suffix structure degenerates to l1
  Eigen::MatrixXd one(2, 2);
  one << 1, -2, 3, -4;
  CHECK(penalty_value(PenaltyKind::hlag, one, 1) ==
        doctest::Approx(penalty_value(PenaltyKind::l1, one, 1)).epsilon(1e-14));
}

TEST_CASE("penalty_value: hlag across a 2x2 block pair, hand value") {
  // d = 2, lags = 2; profile (i,j) = (B1(i,j), B2(i,j))
  Eigen::MatrixXd b(2, 4);
  b << 3, 0, -4, 0,  // profiles (3,-4) and (0,0) in row 0
       0, 1, 0, 0;   // profiles (0,0) and (1,0) in row 1
  const double expect = (5.0 + 4.0) + 0.0 + 0.0 + (1.0 + 0.0);
  CHECK(penalty_value(PenaltyKind::hlag, b, 2) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("l1 prox is the entrywise soft threshold") {
  Eigen::RowVectorXd v(6);
  v << 3, -0.4, 0.5, -2, 0, 1.2;
  Eigen::RowVectorXd got = v;
  prox_inplace(PenaltyKind::l1, got, 0.5, 2, 3);
  for (int i = 0; i < 6; ++i)
    CHECK(got(i) == doctest::Approx(soft(v(i), 0.5)).epsilon(1e-15));
}

TEST_CASE("prox with t = 0 is the identity") {
  Eigen::RowVectorXd v = random_row(6, 42);
  for (auto kind : {PenaltyKind::l1, PenaltyKind::hlag}) {
    Eigen::RowVectorXd got = v;
    prox_inplace(kind, got, 0.0, 2, 3);
    CHECK(got == v);
  }
}

TEST_CASE("prox matches the brute-force oracle on random profiles") {
  int trial = 0;
  for (int lags = 1; lags <= 3; ++lags)
    for (int series = 1; series <= 2; ++series)
      for (int rep = 0; rep < 5; ++rep) {
        ++trial;
        Eigen::RowVectorXd v = random_row(series * lags, 1000 + trial, 2.0);
        const double t = 0.1 + 0.4 * ((trial * 7) % 5);
        for (auto kind : {PenaltyKind::l1, PenaltyKind::hlag}) {
          Eigen::RowVectorXd got = v;
          prox_inplace(kind, got, t, series, lags);
          Eigen::RowVectorXd want = oracle::prox_reference(kind, v, t, series, lags);
          CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-6);
        }
      }
}

TEST_CASE("hlag prox never violates the lag hierarchy") {
  // an entry the prox zeroed (input nonzero) must start an all-zero suffix
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int series = 2, lags = 4;
    Eigen::RowVectorXd v = random_row(series * lags, 5000 + seed, 1.5);
    Eigen::RowVectorXd out = v;
    const double t = 0.2 + 0.05 * static_cast<double>(seed % 9);
    prox_inplace(PenaltyKind::hlag, out, t, series, lags);
    for (int j = 0; j < series; ++j)
      for (int l = 1; l <= lags; ++l) {
        const int at = (l - 1) * series + j;
        if (out(at) == 0.0 && v(at) != 0.0)
          for (int deeper = l; deeper <= lags; ++deeper)
            CHECK(out((deeper - 1) * series + j) == 0.0);
      }
  }
}

TEST_CASE("elastic shrink divides by 1 + alpha*lambda") {
  Eigen::RowVectorXd v = random_row(5, 9);
  Eigen::RowVectorXd got = v;
  elastic_shrink_inplace(got, 0.5, 2.0);
  CHECK((got - v / 2.0).cwiseAbs().maxCoeff() <= 1e-15);

  got = v;
  elastic_shrink_inplace(got, 0.0, 2.0);
  CHECK(got == v);
}

TEST_CASE("lambda_max is the largest absolute cross-moment") {
  GaussianSampler gen(77);
  Eigen::MatrixXd y(2, 15), x(4, 15);
  for (int i = 0; i < y.size(); ++i) y.data()[i] = gen.standard_normal();
  for (int i = 0; i < x.size(); ++i) x.data()[i] = gen.standard_normal();

  double brute = 0.0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < y.rows(); ++j) {
      double dot = 0.0;
      for (int n = 0; n < 15; ++n) dot += x(i, n) * y(j, n);
      brute = std::max(brute, std::abs(dot));
    }
  CHECK(lambda_max(y, x) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("make_grid: endpoints, monotonicity, log-linear spacing") {
  LambdaGrid grid = make_grid(50.0, 10);
  REQUIRE(grid.values.size() == 10);
  CHECK(grid.values.front() == doctest::Approx(50.0).epsilon(1e-14));
  CHECK(grid.values.back() == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t i = 1; i < grid.values.size(); ++i)
    CHECK(grid.values[i] < grid.values[i - 1]);
  const double ratio = grid.values[1] / grid.values[0];
  for (std::size_t i = 2; i < grid.values.size(); ++i)
    CHECK(grid.values[i] / grid.values[i - 1] ==
          doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("penalty spec and prox argument validation") {
  PenaltySpec bad;
  bad.lambda_phi = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  Eigen::RowVectorXd v = random_row(5, 3);
  CHECK_THROWS_AS(prox_inplace(PenaltyKind::l1, v, 0.1, 2, 3),
                  std::invalid_argument);  // 5 != 2*3
  Eigen::RowVectorXd w = random_row(6, 3);
  CHECK_THROWS_AS(prox_inplace(PenaltyKind::l1, w, -0.1, 2, 3),
                  std::invalid_argument);
}
