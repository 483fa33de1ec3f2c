#include "varma/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <omp.h>

namespace varma {

double spectral_step(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& X) {
  const long n = Z.rows() > 0 ? Z.cols() : X.cols();
  const long m = Z.rows() + X.rows();
  if (m == 0 || n == 0)
    throw std::invalid_argument("spectral_step: empty regressor matrix");
  if (Z.rows() > 0 && X.rows() > 0 && Z.cols() != X.cols())
    throw std::invalid_argument("spectral_step: Z and X column mismatch");
  double maxabs = 0.0;
  if (Z.size() > 0) maxabs = std::max(maxabs, Z.cwiseAbs().maxCoeff());
  if (X.size() > 0) maxabs = std::max(maxabs, X.cwiseAbs().maxCoeff());
  if (maxabs == 0.0)
    throw std::invalid_argument("spectral_step: all-zero regressor matrix");

  // Power iteration on A'A with A = [Z; X].  Fixed pseudo-random start so
  // the estimate is reproducible and almost surely not orthogonal to the
  // leading eigenvector.
  std::mt19937_64 eng(0x5eed0001u);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i)
    v(i) = ((eng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
  v /= v.norm();

  double lam = 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    if (Z.rows() > 0) u.noalias() += Z.transpose() * (Z * v);
    if (X.rows() > 0) u.noalias() += X.transpose() * (X * v);
    const double lam_new = v.dot(u);
    const double nu = u.norm();
    if (nu == 0.0) {
      lam = 0.0;  // start vector fell in the null space; treat as converged
      break;
    }
    v = u / nu;
    if (iter >= 10 && std::abs(lam_new - lam) <= 1e-10 * std::max(lam_new, 1e-300)) {
      lam = lam_new;
      break;
    }
    lam = lam_new;
  }
  if (lam <= 0.0)
    throw std::invalid_argument("spectral_step: could not estimate a positive norm");
  // Rayleigh quotients approach sigma_1^2 from below; pad a hair so the
  // returned step never exceeds the safe bound.
  return 1.0 / (lam * (1.0 + 1e-6));
}

namespace {

// Penalty of one coefficient row treated as `lags` blocks of `series`
// entries; mirrors penalty_value on a 1 x (series*lags) layout where the
// profile of series j is v[j], v[series+j], ...
double row_penalty(PenaltyKind kind, const Eigen::RowVectorXd& v, int series,
                   int lags) {
  if (v.size() == 0) return 0.0;
  if (kind == PenaltyKind::l1) return v.cwiseAbs().sum();
  double acc = 0.0;
  for (int j = 0; j < series; ++j) {
    double tail = 0.0;
    for (int l = lags; l >= 1; --l) {
      const double x = v((l - 1) * series + j);
      tail += x * x;
      acc += std::sqrt(tail);
    }
  }
  return acc;
}

}  // namespace

double row_objective(const Eigen::Ref<const Eigen::RowVectorXd>& y,
                     const Eigen::Ref<const Eigen::MatrixXd>& Z,
                     const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::RowVectorXd>& phi,
                     const Eigen::Ref<const Eigen::RowVectorXd>& theta,
                     const PenaltySpec& spec, int series) {
  if (series < 1) throw std::invalid_argument("row_objective: series must be >= 1");
  Eigen::RowVectorXd r = y;
  if (Z.rows() > 0) r.noalias() -= phi * Z;
  if (X.rows() > 0) r.noalias() -= theta * X;
  double obj = 0.5 * r.squaredNorm();
  if (phi.size() > 0)
    obj += spec.lambda_phi *
               row_penalty(spec.kind, phi, series,
                           static_cast<int>(phi.size()) / series) +
           0.5 * spec.alpha * spec.lambda_phi * phi.squaredNorm();
  if (theta.size() > 0)
    obj += spec.lambda_theta *
               row_penalty(spec.kind, theta, series,
                           static_cast<int>(theta.size()) / series) +
           0.5 * spec.alpha * spec.lambda_theta * theta.squaredNorm();
  return obj;
}

namespace {

// Euclidean projection onto the l1 ball of radius m (Duchi et al. pivot-free
// sort variant), applied jointly to the concatenated coefficient row.
void project_l1_ball(Eigen::RowVectorXd& phi, Eigen::RowVectorXd& theta,
                     double m) {
  const long np = phi.size(), nt = theta.size();
  double sum = phi.cwiseAbs().sum() + theta.cwiseAbs().sum();
  if (sum <= m) return;
  std::vector<double> mags(np + nt);
  for (long i = 0; i < np; ++i) mags[i] = std::abs(phi(i));
  for (long i = 0; i < nt; ++i) mags[np + i] = std::abs(theta(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cum += mags[k];
    const double cand = (cum - m) / static_cast<double>(k + 1);
    if (k + 1 == mags.size() || mags[k + 1] <= cand) {
      tau = cand;
      break;
    }
  }
  auto shrink = [tau](double x) {
    const double a = std::abs(x) - tau;
    return a > 0 ? (x > 0 ? a : -a) : 0.0;
  };
  for (long i = 0; i < np; ++i) phi(i) = shrink(phi(i));
  for (long i = 0; i < nt; ++i) theta(i) = shrink(theta(i));
}

struct RowObjective {
  const RowProblem& prob;
  int p, q;  // lag counts implied by block heights

  double operator()(const Eigen::RowVectorXd& phi,
                    const Eigen::RowVectorXd& theta,
                    const Eigen::RowVectorXd& resid) const {
    const auto& pen = prob.penalty;
    double obj = 0.5 * resid.squaredNorm();
    if (phi.size() > 0)
      obj += pen.lambda_phi * row_penalty(pen.kind, phi, prob.series, p) +
             0.5 * pen.alpha * pen.lambda_phi * phi.squaredNorm();
    if (theta.size() > 0)
      obj += pen.lambda_theta * row_penalty(pen.kind, theta, prob.series, q) +
             0.5 * pen.alpha * pen.lambda_theta * theta.squaredNorm();
    return obj;
  }
};

}  // namespace

RowSolution solve_row(const RowProblem& prob,
                      const Eigen::Ref<const Eigen::RowVectorXd>& init_phi,
                      const Eigen::Ref<const Eigen::RowVectorXd>& init_theta) {
  prob.penalty.validate();
  if (prob.series < 1) throw std::invalid_argument("solve_row: series must be >= 1");
  if (prob.step <= 0) throw std::invalid_argument("solve_row: step must be > 0");
  const long n = prob.y.size();
  const long zp = prob.Z.rows(), xq = prob.X.rows();
  if (zp + xq == 0) throw std::invalid_argument("solve_row: no regressors");
  if ((zp > 0 && prob.Z.cols() != n) || (xq > 0 && prob.X.cols() != n))
    throw std::invalid_argument("solve_row: regressor / response length mismatch");
  if (init_phi.size() != zp || init_theta.size() != xq)
    throw std::invalid_argument("solve_row: bad init sizes");
  if (zp % prob.series != 0 || xq % prob.series != 0)
    throw std::invalid_argument("solve_row: block heights not multiples of series");
  const int p = static_cast<int>(zp) / prob.series;
  const int q = static_cast<int>(xq) / prob.series;
  const double s = prob.step;
  const auto& pen = prob.penalty;
  const RowObjective objective{prob, p, q};

  Eigen::RowVectorXd phi = init_phi, phi_old = init_phi;
  Eigen::RowVectorXd theta = init_theta, theta_old = init_theta;

  Eigen::RowVectorXd resid = prob.y;
  if (zp > 0) resid.noalias() -= phi * prob.Z;
  if (xq > 0) resid.noalias() -= theta * prob.X;
  const double initial_obj = objective(phi, theta, resid);

  SolveDiagnostics diag;
  diag.final_objective = initial_obj;
  double obj_prev = initial_obj, obj_prev2 = initial_obj;
  long momentum_r = 3;  // effective iteration counter for the weight

  Eigen::RowVectorXd phi_ex(zp), theta_ex(xq), partial(n);
  for (int it = 1; it <= prob.options.max_iter; ++it, ++momentum_r) {
    const double w = static_cast<double>(momentum_r - 2) / (momentum_r + 1);

    if (zp > 0) {
      phi_ex = phi + w * (phi - phi_old);
      partial = prob.y - phi_ex * prob.Z;
      if (xq > 0) partial.noalias() -= theta * prob.X;
      phi_old = phi;
      // gradient of the smooth part at the extrapolated point is -r Z'
      phi = phi_ex + s * (partial * prob.Z.transpose());
      prox_inplace(pen.kind, phi, s * pen.lambda_phi, prob.series, p);
      // prox of s*(lambda P + (alpha lambda / 2) |.|^2): threshold at
      // s*lambda, then divide by 1 + s*alpha*lambda
      elastic_shrink_inplace(phi, pen.alpha, s * pen.lambda_phi);
    }

    if (xq > 0) {
      theta_ex = theta + w * (theta - theta_old);
      partial = prob.y - theta_ex * prob.X;
      if (zp > 0) partial.noalias() -= phi * prob.Z;  // fresh phi
      theta_old = theta;
      theta = theta_ex + s * (partial * prob.X.transpose());
      prox_inplace(pen.kind, theta, s * pen.lambda_theta, prob.series, q);
      elastic_shrink_inplace(theta, pen.alpha, s * pen.lambda_theta);
    }

    if (prob.options.l1_bound) project_l1_ball(phi, theta, *prob.options.l1_bound);

    resid = prob.y;
    if (zp > 0) resid.noalias() -= phi * prob.Z;
    if (xq > 0) resid.noalias() -= theta * prob.X;
    const double obj = objective(phi, theta, resid);
    diag.iterations = it;
    diag.final_objective = obj;

    if (obj > 1e3 * initial_obj && obj > 1e-10)
      throw SolverError("solve_row: objective diverged (initial " +
                        std::to_string(initial_obj) + ", current " +
                        std::to_string(obj) + ")");

    double delta = 0.0;
    if (zp > 0) delta = (phi - phi_old).cwiseAbs().maxCoeff();
    if (xq > 0)
      delta = std::max(delta, (theta - theta_old).cwiseAbs().maxCoeff());
    diag.final_delta_inf = delta;
    if (delta <= prob.options.epsilon) {
      diag.converged = true;
      break;
    }

    if (obj > obj_prev && obj_prev > obj_prev2) {
      // two consecutive increases: drop the momentum and restart the schedule
      momentum_r = 2;  // next weight is zero
      phi_old = phi;
      theta_old = theta;
      ++diag.restarts;
    }
    obj_prev2 = obj_prev;
    obj_prev = obj;
  }

  return RowSolution{std::move(phi), std::move(theta), diag};
}

namespace {

MultiRowFit solve_rows_impl(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z,
                            const Eigen::MatrixXd& X, const PenaltySpec& spec,
                            const SolverOptions& options,
                            const Eigen::MatrixXd& init_phi,
                            const Eigen::MatrixXd& init_theta, double step,
                            bool parallel) {
  const int d = static_cast<int>(Y.rows());
  if (d < 1) throw std::invalid_argument("solve_all_rows: empty response");
  if (init_phi.rows() != d || init_theta.rows() != d ||
      init_phi.cols() != Z.rows() || init_theta.cols() != X.rows())
    throw std::invalid_argument("solve_all_rows: bad init shape");
  if (step <= 0) step = spectral_step(Z, X);

  MultiRowFit fit;
  fit.phi.resize(d, Z.rows());
  fit.theta.resize(d, X.rows());
  fit.rows.resize(d);
  std::vector<std::string> errors(d);

#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < d; ++i) {
    try {
      RowProblem prob{Y.row(i), Z, X, d, spec, step, options};
      RowSolution sol = solve_row(prob, init_phi.row(i), init_theta.row(i));
      fit.phi.row(i) = sol.phi;
      fit.theta.row(i) = sol.theta;
      fit.rows[i] = sol.diag;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  std::vector<int> failed;
  for (int i = 0; i < d; ++i)
    if (!errors[i].empty()) failed.push_back(i);
  if (!failed.empty()) {
    std::string what = "solve_all_rows: " + std::to_string(failed.size()) +
                       " row(s) failed; first: row " +
                       std::to_string(failed.front()) + ": " +
                       errors[failed.front()];
    throw SolverError(what, failed);
  }
  for (const auto& r : fit.rows) fit.all_converged &= r.converged;
  return fit;
}

}  // namespace

MultiRowFit solve_all_rows(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z,
                           const Eigen::MatrixXd& X, const PenaltySpec& spec,
                           const SolverOptions& options,
                           const Eigen::MatrixXd& init_phi,
                           const Eigen::MatrixXd& init_theta, double step) {
  return solve_rows_impl(Y, Z, X, spec, options, init_phi, init_theta, step,
                         true);
}

MultiRowFit solve_all_rows_serial(const Eigen::MatrixXd& Y,
                                  const Eigen::MatrixXd& Z,
                                  const Eigen::MatrixXd& X,
                                  const PenaltySpec& spec,
                                  const SolverOptions& options,
                                  const Eigen::MatrixXd& init_phi,
                                  const Eigen::MatrixXd& init_theta,
                                  double step) {
  return solve_rows_impl(Y, Z, X, spec, options, init_phi, init_theta, step,
                         false);
}

}  // namespace varma
