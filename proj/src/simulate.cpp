#include "varma/simulate.hpp"

#include <Eigen/Cholesky>

#include "varma/core.hpp"
#include "varma/rng.hpp"

namespace varma {

VarmaModel build_dgp(const DgpSpec& spec) {
  if (spec.d < 1 || spec.p < 0 || spec.q < 0)
    throw std::invalid_argument("dgp: need d >= 1 and nonnegative orders");
  const int d = spec.d;

  std::vector<Eigen::MatrixXd> phi(spec.p);
  for (int l = 1; l <= spec.p; ++l)
    phi[l - 1] = (0.4 / l) * Eigen::MatrixXd::Identity(d, d);

  std::vector<Eigen::MatrixXd> theta(spec.q);
  for (int m = 1; m <= spec.q; ++m) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      t(i, i) = spec.theta / m;
      if (i + 1 < d) t(i, i + 1) = t(i + 1, i) = spec.theta / (10.0 * m);
      if (i + 2 < d) t(i, i + 2) = t(i + 2, i) = spec.theta / (100.0 * m);
    }
    theta[m - 1] = std::move(t);
  }

  VarmaModel model{LagPolynomial::ar(d, std::move(phi)),
                   LagPolynomial::ma(d, std::move(theta)),
                   spec.sigma_a ? *spec.sigma_a
                                : Eigen::MatrixXd::Identity(d, d)};
  model.validate();
  if (auto r = check_stable(model.phi); !r.ok)
    throw std::domain_error("dgp: AR part not stable (radius " +
                            std::to_string(r.radius) + ")");
  if (auto r = check_invertible(model.theta); !r.ok)
    throw std::domain_error("dgp: MA part not invertible (radius " +
                            std::to_string(r.radius) + ")");
  return model;
}

VarmaModel toy_model(bool dense) {
  Eigen::MatrixXd phi(2, 2), theta(2, 2);
  if (dense) {
    phi << 0.2, 0.05, 0.0, 0.1;
    theta << 0.0, -0.25, 0.0, -0.1;
  } else {
    phi << 0.2, 0.0, 0.0, 0.0;
    theta << 0.0, -0.2, 0.0, 0.0;
  }
  return VarmaModel{LagPolynomial::ar(2, {phi}), LagPolynomial::ma(2, {theta}),
                    Eigen::MatrixXd::Identity(2, 2)};
}

SimulatedPath simulate_path(const VarmaModel& model, int T, int burn_in,
                            std::uint64_t seed) {
  model.validate();
  if (T < 1) throw std::invalid_argument("simulate: T must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("simulate: burn_in must be >= 0");
  if (!check_stable(model.phi).ok)
    throw std::domain_error("simulate: model is not stable");
  if (!check_invertible(model.theta).ok)
    throw std::domain_error("simulate: model is not invertible");

  const int d = model.dim();
  const int p = model.p();
  const int q = model.q();
  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma_a);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("simulate: sigma_a has no Cholesky factor");
  const Eigen::MatrixXd chol = llt.matrixL();

  GaussianSampler rng(seed);
  const int total = burn_in + T;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(total, d);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(total, d);
  Eigen::VectorXd z(d);
  for (int t = 0; t < total; ++t) {
    for (int i = 0; i < d; ++i) z(i) = rng.standard_normal();
    a.row(t) = (chol * z).transpose();
    Eigen::RowVectorXd acc = a.row(t);
    for (int l = 1; l <= p && l <= t; ++l)
      acc += y.row(t - l) * model.phi.coeffs[l - 1].transpose();
    for (int m = 1; m <= q && m <= t; ++m)
      acc += a.row(t - m) * model.theta.coeffs[m - 1].transpose();
    y.row(t) = acc;
  }

  SimulatedPath out;
  out.observations.values = y.bottomRows(T);
  out.innovations = a.bottomRows(T);
  return out;
}

}  // namespace varma
