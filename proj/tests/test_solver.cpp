#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "varma/rng.hpp"
#include "varma/solver.hpp"

using namespace varma;

namespace {

Eigen::MatrixXd random_mat(int r, int c, std::uint64_t seed) {
  GaussianSampler gen(seed);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = gen.standard_normal();
  return m;
}

double soft(double x, double t) {
  return std::copysign(std::max(std::abs(x) - t, 0.0), x);
}

SolverOptions tight() {
  SolverOptions o;
  o.epsilon = 1e-10;
  return o;
}

RowSolution solve_simple(const Eigen::RowVectorXd& y, const Eigen::MatrixXd& Z,
                         const Eigen::MatrixXd& X, const PenaltySpec& spec,
                         const SolverOptions& opts) {
  RowProblem prob{y, Z, X, 1, spec, spectral_step(Z, X), opts};
  Eigen::RowVectorXd phi0 = Eigen::RowVectorXd::Zero(Z.rows());
  Eigen::RowVectorXd theta0 = Eigen::RowVectorXd::Zero(X.rows());
  return solve_row(prob, phi0, theta0);
}

}  // namespace

TEST_CASE("spectral_step approximates one over the squared top singular value") {
  // the power iteration stops once successive Rayleigh quotients agree to
  // 1e-10 relative, which leaves a larger gap to sigma_1^2 itself; a few
  // 1e-6 relative error is expected, so compare at 1e-5
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Eigen::MatrixXd z = random_mat(4, 20, seed);
    Eigen::MatrixXd x = random_mat(3, 20, seed + 50);
    Eigen::MatrixXd stacked(7, 20);
    stacked << z, x;
    const double sigma = oracle::top_singular_value(stacked);
    const double bound = 1.0 / (sigma * sigma);
    const double step = spectral_step(z, x);
    CHECK(step == doctest::Approx(bound).epsilon(1e-5));
    CHECK(step <= bound * (1.0 + 1e-5));  // never meaningfully above the safe bound

    Eigen::MatrixXd none(0, 20);
    const double sz = oracle::top_singular_value(z);
    CHECK(spectral_step(z, none) ==
          doctest::Approx(1.0 / (sz * sz)).epsilon(1e-5));
  }
}

TEST_CASE("spectral_step rejects degenerate input") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 10);
  Eigen::MatrixXd none(0, 10);
  CHECK_THROWS_AS(spectral_step(zero, none), std::invalid_argument);
  CHECK_THROWS_AS(spectral_step(none, none), std::invalid_argument);
  Eigen::MatrixXd short_x = Eigen::MatrixXd::Ones(2, 7);
  CHECK_THROWS_AS(spectral_step(Eigen::MatrixXd::Ones(2, 10), short_x),
                  std::invalid_argument);
}

TEST_CASE("row_objective: hand-computed value") {
  Eigen::RowVectorXd y(2), phi(1), theta(1);
  y << 1, 2;
  phi << 0.5;
  theta << -1;
  Eigen::MatrixXd z(1, 2), x(1, 2);
  z << 2, 0;
  x << 0, 1;
  PenaltySpec spec;
  spec.lambda_phi = 3.0;
  spec.lambda_theta = 2.0;
  spec.alpha = 0.1;
  // resid = (1,2) - 0.5*(2,0) + (0,1) = (0,3); 0.5*9 = 4.5
  // penalties: 3*0.5 + 2*1 = 3.5; ridge: 0.05*(3*0.25 + 2*1) = 0.1375
  CHECK(row_objective(y, z, x, phi, theta, spec, 1) ==
        doctest::Approx(4.5 + 3.5 + 0.1375).epsilon(1e-14));
}

TEST_CASE("identity design: lasso solution is the soft threshold") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(5, 5);
  Eigen::MatrixXd x(0, 5);
  Eigen::RowVectorXd y(5);
  y << 3, -0.2, 1.4, 0.05, -2;
  PenaltySpec spec;
  spec.lambda_phi = 0.5;
  RowSolution sol = solve_simple(y, z, x, spec, tight());
  REQUIRE(sol.diag.converged);
  for (int i = 0; i < 5; ++i)
    CHECK(sol.phi(i) == doctest::Approx(soft(y(i), 0.5)).epsilon(1e-8));
}

TEST_CASE("random lasso instances match the coordinate-descent oracle") {
  int inst = 0;
  for (std::uint64_t seed : {10u, 11u, 12u, 13u, 14u, 15u}) {
    ++inst;
    const int m = 2 + static_cast<int>(seed % 5);  // regressors
    const int n = 40;
    Eigen::MatrixXd z = random_mat(m, n, seed);
    Eigen::RowVectorXd truth = random_mat(1, m, seed + 200).row(0);
    Eigen::RowVectorXd y =
        truth * z + 0.1 * random_mat(1, n, seed + 400).row(0);
    Eigen::MatrixXd x(0, n);

    const double alpha = (inst % 2 == 0) ? 0.2 : 0.0;
    const double lam = 0.3 + 0.2 * (inst % 3);
    PenaltySpec spec;
    spec.lambda_phi = lam;
    spec.lambda_theta = lam;
    spec.alpha = alpha;

    RowSolution sol = solve_simple(y, z, x, spec, tight());
    REQUIRE(sol.diag.converged);

    oracle::LassoCdResult ref = oracle::lasso_cd(
        z.transpose(), y.transpose(), lam, alpha);
    Eigen::RowVectorXd none(0);
    const double got = row_objective(y, z, x, sol.phi, none, spec, 1);
    CHECK(got <= ref.objective + 1e-6);
    CHECK(got >= ref.objective - 1e-6);
  }
}

TEST_CASE("two-block fit reaches the stacked single-lasso optimum") {
  // equal block weights and l1 make the split problem one big lasso
  const int n = 50;
  Eigen::MatrixXd z = random_mat(3, n, 31);
  Eigen::MatrixXd x = random_mat(2, n, 32);
  Eigen::RowVectorXd y = random_mat(1, n, 33).row(0) * 2.0;

  PenaltySpec spec;
  spec.lambda_phi = spec.lambda_theta = 0.7;
  RowSolution sol = solve_simple(y, z, x, spec, tight());
  REQUIRE(sol.diag.converged);

  Eigen::MatrixXd stacked(5, n);
  stacked << z, x;
  oracle::LassoCdResult ref =
      oracle::lasso_cd(stacked.transpose(), y.transpose(), 0.7, 0.0);
  const double got = row_objective(y, z, x, sol.phi, sol.theta, spec, 1);
  CHECK(std::abs(got - ref.objective) <= 1e-6);
}

TEST_CASE("split penalties satisfy the stationarity conditions") {
  const int n = 60;
  Eigen::MatrixXd z = random_mat(4, n, 41);
  Eigen::MatrixXd x = random_mat(3, n, 42);
  Eigen::RowVectorXd y = random_mat(1, n, 43).row(0) * 1.5;

  PenaltySpec spec;
  spec.lambda_phi = 0.9;
  spec.lambda_theta = 0.4;
  spec.alpha = 0.05;
  RowSolution sol = solve_simple(y, z, x, spec, tight());
  REQUIRE(sol.diag.converged);

  Eigen::RowVectorXd resid = y - sol.phi * z - sol.theta * x;
  auto check_block = [&](const Eigen::RowVectorXd& beta,
                         const Eigen::MatrixXd& design, double lam) {
    Eigen::RowVectorXd grad = -(resid * design.transpose());
    for (int j = 0; j < beta.size(); ++j) {
      if (beta(j) != 0.0) {
        const double stat = grad(j) + lam * (beta(j) > 0 ? 1.0 : -1.0) +
                            spec.alpha * lam * beta(j);
        CHECK(std::abs(stat) <= 1e-5);
      } else {
        CHECK(std::abs(grad(j)) <= lam + 1e-5);
      }
    }
  };
  check_block(sol.phi, z, spec.lambda_phi);
  check_block(sol.theta, x, spec.lambda_theta);
}

TEST_CASE("weights at or above lambda_max zero the fit exactly") {
  const int n = 30;
  Eigen::MatrixXd z = random_mat(4, n, 55);
  Eigen::MatrixXd y = random_mat(2, n, 56);
  Eigen::MatrixXd x(0, n);
  const double lmax = lambda_max(y, z);

  PenaltySpec spec;
  spec.lambda_phi = lmax;
  spec.lambda_theta = lmax;
  MultiRowFit fit = solve_all_rows(y, z, x, spec, tight(),
                                   Eigen::MatrixXd::Zero(2, 4),
                                   Eigen::MatrixXd::Zero(2, 0));
  CHECK(fit.phi.cwiseAbs().maxCoeff() == 0.0);

  spec.lambda_phi = spec.lambda_theta = 0.95 * lmax;
  MultiRowFit loose = solve_all_rows(y, z, x, spec, tight(),
                                     Eigen::MatrixXd::Zero(2, 4),
                                     Eigen::MatrixXd::Zero(2, 0));
  CHECK(loose.phi.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("hierarchical fit keeps lag hierarchy in every row") {
  const int d = 2, lags = 3, n = 80;
  Eigen::MatrixXd z = random_mat(d * lags, n, 61);
  Eigen::MatrixXd y = random_mat(d, n, 62);
  Eigen::MatrixXd x(0, n);
  PenaltySpec spec;
  spec.kind = PenaltyKind::hlag;
  spec.lambda_phi = 4.0;
  MultiRowFit fit = solve_all_rows(y, z, x, spec, tight(),
                                   Eigen::MatrixXd::Zero(d, d * lags),
                                   Eigen::MatrixXd::Zero(d, 0));
  REQUIRE(fit.all_converged);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 1; l <= lags; ++l)
        if (fit.phi(i, (l - 1) * d + j) == 0.0)
          for (int deeper = l + 1; deeper <= lags; ++deeper)
            CHECK(fit.phi(i, (deeper - 1) * d + j) == 0.0);
}

TEST_CASE("parallel rows match the serial reference bitwise") {
  const int d = 3, n = 40;
  Eigen::MatrixXd z = random_mat(6, n, 71);
  Eigen::MatrixXd x = random_mat(3, n, 72);
  Eigen::MatrixXd y = random_mat(d, n, 73);
  PenaltySpec spec;
  spec.lambda_phi = 0.8;
  spec.lambda_theta = 0.5;
  Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(d, 6);
  Eigen::MatrixXd t0 = Eigen::MatrixXd::Zero(d, 3);
  SolverOptions opts;  // default tolerance, realistic use

  MultiRowFit par = solve_all_rows(y, z, x, spec, opts, p0, t0);
  MultiRowFit ser = solve_all_rows_serial(y, z, x, spec, opts, p0, t0);
  CHECK(par.phi == ser.phi);
  CHECK(par.theta == ser.theta);
  REQUIRE(par.rows.size() == ser.rows.size());
  for (std::size_t i = 0; i < par.rows.size(); ++i)
    CHECK(par.rows[i].iterations == ser.rows[i].iterations);
}

TEST_CASE("warm starts land on the same optimum") {
  const int n = 50;
  Eigen::MatrixXd z = random_mat(3, n, 81);
  Eigen::MatrixXd x = random_mat(2, n, 82);
  Eigen::RowVectorXd y = random_mat(1, n, 83).row(0);
  PenaltySpec spec;
  spec.lambda_phi = 0.6;
  spec.lambda_theta = 0.6;
  spec.alpha = 0.1;  // strictly convex: unique optimum

  RowProblem prob{y, z, x, 1, spec, spectral_step(z, x), tight()};
  Eigen::RowVectorXd zp = Eigen::RowVectorXd::Zero(3);
  Eigen::RowVectorXd zt = Eigen::RowVectorXd::Zero(2);
  RowSolution cold = solve_row(prob, zp, zt);
  Eigen::RowVectorXd wp = random_mat(1, 3, 84).row(0);
  Eigen::RowVectorXd wt = random_mat(1, 2, 85).row(0);
  RowSolution warm = solve_row(prob, wp, wt);
  CHECK((cold.phi - warm.phi).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((cold.theta - warm.theta).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("joint l1 bound caps the coefficient budget") {
  const int n = 40;
  Eigen::MatrixXd z = random_mat(4, n, 91);
  Eigen::MatrixXd x(0, n);
  Eigen::RowVectorXd y = random_mat(1, n, 92).row(0) * 3.0;
  PenaltySpec spec;
  spec.lambda_phi = 0.01;  // nearly unpenalised: bound must bind

  SolverOptions opts = tight();
  RowSolution free_fit = solve_simple(y, z, x, spec, opts);
  const double free_l1 = free_fit.phi.cwiseAbs().sum();
  REQUIRE(free_l1 > 0.5);

  opts.l1_bound = 0.5 * free_l1;
  RowSolution capped = solve_simple(y, z, x, spec, opts);
  CHECK(capped.phi.cwiseAbs().sum() <= *opts.l1_bound + 1e-8);
}

TEST_CASE("solve_row validates its inputs") {
  Eigen::RowVectorXd y = random_mat(1, 10, 95).row(0);
  Eigen::MatrixXd z = random_mat(2, 10, 96);
  Eigen::MatrixXd x(0, 10);
  PenaltySpec spec;
  Eigen::RowVectorXd p0 = Eigen::RowVectorXd::Zero(2);
  Eigen::RowVectorXd t0 = Eigen::RowVectorXd::Zero(0);

  RowProblem no_step{y, z, x, 1, spec, 0.0, SolverOptions{}};
  CHECK_THROWS_AS(solve_row(no_step, p0, t0), std::invalid_argument);

  Eigen::RowVectorXd bad_init = Eigen::RowVectorXd::Zero(3);
  RowProblem ok{y, z, x, 1, spec, spectral_step(z, x), SolverOptions{}};
  CHECK_THROWS_AS(solve_row(ok, bad_init, t0), std::invalid_argument);

  Eigen::RowVectorXd short_y = random_mat(1, 9, 97).row(0);
  RowProblem mismatch{short_y, z, x, 1, spec, 1.0, SolverOptions{}};
  CHECK_THROWS_AS(solve_row(mismatch, p0, t0), std::invalid_argument);
}

TEST_CASE("diagnostics report a converged, finite solve") {
  const int n = 30;
  Eigen::MatrixXd z = random_mat(3, n, 99);
  Eigen::MatrixXd x(0, n);
  Eigen::RowVectorXd y = random_mat(1, n, 100).row(0);
  PenaltySpec spec;
  spec.lambda_phi = 0.4;
  RowSolution sol = solve_simple(y, z, x, spec, SolverOptions{});
  CHECK(sol.diag.converged);
  CHECK(sol.diag.iterations >= 1);
  CHECK(sol.diag.final_delta_inf <= SolverOptions{}.epsilon);
  Eigen::RowVectorXd none(0);
  CHECK(sol.diag.final_objective ==
        doctest::Approx(row_objective(y, z, x, sol.phi, none, spec, 1))
            .epsilon(1e-9));
}
