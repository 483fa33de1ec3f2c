#include <Eigen/Dense>

#include "doctest.h"
#include "varma/forecast.hpp"
#include "varma/pipeline.hpp"
#include "varma/simulate.hpp"

using namespace varma;

namespace {

Eigen::MatrixXd m2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("pure VAR(1): h-step forecast is the matrix-power recursion") {
  Eigen::MatrixXd a = m2(0.5, 0.1, 0.0, 0.4);
  VarmaModel model{LagPolynomial::ar(2, {a}), LagPolynomial::ma(2, {}),
                   Eigen::MatrixXd::Identity(2, 2)};
  Eigen::MatrixXd y(4, 2);
  y << 0.3, -1.1, 0.7, 0.2, -0.4, 0.9, 1.3, -0.6;

  Eigen::MatrixXd fc = forecast_h(model, y, Eigen::MatrixXd(0, 0), 3);
  REQUIRE(fc.rows() == 3);

  Eigen::VectorXd step = y.row(3).transpose();
  for (int s = 0; s < 3; ++s) {
    step = a * step;
    CHECK((fc.row(s).transpose() - step).cwiseAbs().maxCoeff() <= 1e-14);
  }
  // associativity-independent cross-check at h = 3
  Eigen::VectorXd cube = a * a * a * y.row(3).transpose();
  CHECK((fc.row(2).transpose() - cube).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("MA terms drop out of the forecast after q steps") {
  Eigen::MatrixXd th = m2(0.3, 0.0, 0.0, 0.2);
  VarmaModel model{LagPolynomial::ar(2, {}), LagPolynomial::ma(2, {th}),
                   Eigen::MatrixXd::Identity(2, 2)};
  Eigen::MatrixXd y(3, 2);
  y << 1, 2, 3, 4, 5, 6;
  Eigen::MatrixXd innov(1, 2);
  innov << 2.0, -1.0;

  Eigen::MatrixXd fc = forecast_h(model, y, innov, 3);
  CHECK((fc.row(0).transpose() - th * innov.row(0).transpose())
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
  CHECK(fc.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(fc.row(2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("innovation history aligns with the tail of the sample") {
  // q = 2: the one-step forecast needs the origin innovation at lag 1 and
  // the previous one at lag 2; a one-row history must only feed lag 1.
  Eigen::MatrixXd th1 = m2(0.5, 0, 0, 0.5), th2 = m2(0.25, 0, 0, 0.25);
  Eigen::MatrixXd theta(2, 4);
  theta << th1, th2;
  Eigen::MatrixXd phi(2, 0);
  Eigen::MatrixXd y(3, 2);
  y << 0, 0, 0, 0, 0, 0;
  Eigen::MatrixXd last(1, 2), both(2, 2);
  last << 4, -2;
  both << 6, 8,  // innovation at the second-to-last time
      4, -2;     // innovation at the origin

  Eigen::MatrixXd short_fc = forecast_recursive(phi, theta, y, last, 2);
  CHECK((short_fc.row(0).transpose() - th1 * last.row(0).transpose())
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
  CHECK((short_fc.row(1).transpose() - th2 * last.row(0).transpose())
            .cwiseAbs()
            .maxCoeff() <= 1e-15);

  Eigen::MatrixXd full_fc = forecast_recursive(phi, theta, y, both, 2);
  Eigen::VectorXd h1 =
      th1 * both.row(1).transpose() + th2 * both.row(0).transpose();
  CHECK((full_fc.row(0).transpose() - h1).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((full_fc.row(1).transpose() - th2 * both.row(1).transpose())
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
}

TEST_CASE("one-step forecasts recover the simulation innovations") {
  VarmaModel model = toy_model(true);
  SimulatedPath path = simulate_path(model, 30, 0, 77);
  const auto& y = path.observations.values;
  const auto& a = path.innovations;
  for (int t = 5; t < 29; ++t) {
    Eigen::MatrixXd fc =
        forecast_h(model, y.topRows(t + 1), a.topRows(t + 1), 1);
    CHECK((y.row(t + 1) - fc.row(0) - a.row(t + 1)).cwiseAbs().maxCoeff() <=
          1e-13);
  }
}

TEST_CASE("forecasts are jointly linear in history and innovations") {
  VarmaModel model = toy_model(true);
  SimulatedPath path = simulate_path(model, 20, 10, 13);
  Eigen::MatrixXd fc = forecast_h(model, path.observations.values,
                                  path.innovations, 4);
  Eigen::MatrixXd doubled = forecast_h(model, 2.0 * path.observations.values,
                                       2.0 * path.innovations, 4);
  CHECK(doubled == 2.0 * fc);  // scaling by 2 is exact in floating point
}

TEST_CASE("first-phase forecasts undo the standardization") {
  // hand-built fit: pi = diag(0.5, 0.4) on standardized values
  Phase1Result fit;
  fit.pi_hat = m2(0.5, 0.0, 0.0, 0.4);
  fit.p_tilde = 1;
  fit.scaling.standardized = true;
  fit.scaling.mean = Eigen::VectorXd::Zero(2);
  fit.scaling.sd = Eigen::VectorXd::Ones(2);
  fit.scaling.mean << 1.0, -2.0;
  fit.scaling.sd << 2.0, 4.0;

  PanelData history;
  history.values.resize(2, 2);
  history.values << 0, 0, 3.0, 2.0;  // scaled tail row: (1.0, 1.0)

  Eigen::MatrixXd fc = forecast_h(fit, history, 2);
  // scaled forecasts: (0.5, 0.4), then (0.25, 0.16); back to data units
  CHECK(fc(0, 0) == doctest::Approx(1.0 + 2.0 * 0.5).epsilon(1e-14));
  CHECK(fc(0, 1) == doctest::Approx(-2.0 + 4.0 * 0.4).epsilon(1e-14));
  CHECK(fc(1, 0) == doctest::Approx(1.0 + 2.0 * 0.25).epsilon(1e-14));
  CHECK(fc(1, 1) == doctest::Approx(-2.0 + 4.0 * 0.16).epsilon(1e-14));

  PanelData wrong;
  wrong.values = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(forecast_h(fit, wrong, 1), std::invalid_argument);
}

TEST_CASE("two-phase forecasts demand the fitted sample length") {
  SimulatedPath path = simulate_path(toy_model(true), 40, 20, 19);
  FitConfig config;
  config.penalty = PenaltyKind::l1;
  config.orders = Orders{3, 1, 1};
  config.grid_size = 5;
  TwoPhaseFit fit = two_phase_fit(path.observations, config);

  Eigen::MatrixXd fc = forecast_h(fit, path.observations, 3);
  CHECK(fc.rows() == 3);
  CHECK(fc.allFinite());

  PanelData truncated{path.observations.values.topRows(35), {}};
  CHECK_THROWS_AS(forecast_h(fit, truncated, 1), std::invalid_argument);
}

TEST_CASE("forecast argument validation") {
  Eigen::MatrixXd phi = m2(0.5, 0, 0, 0.5);
  Eigen::MatrixXd y(1, 2);
  y << 1, 2;
  Eigen::MatrixXd none(0, 2);
  CHECK_THROWS_AS(forecast_recursive(phi, Eigen::MatrixXd(2, 0), y, none, 0),
                  std::invalid_argument);

  Eigen::MatrixXd phi2(2, 4);
  phi2 << phi, phi;
  CHECK_THROWS_AS(
      forecast_recursive(phi2, Eigen::MatrixXd(2, 0), y, none, 1),
      std::invalid_argument);  // history shorter than the AR order

  Eigen::MatrixXd ragged(2, 3);  // not a multiple of d
  ragged.setZero();
  CHECK_THROWS_AS(forecast_recursive(ragged, Eigen::MatrixXd(2, 0), y, none, 1),
                  std::invalid_argument);

  Eigen::MatrixXd bad_innov(1, 3);
  bad_innov.setZero();
  CHECK_THROWS_AS(forecast_recursive(phi, phi, y, bad_innov, 1),
                  std::invalid_argument);
}
