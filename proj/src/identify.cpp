#include "varma/identify.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace varma {

ConstraintSystem build_constraints(const LagPolynomial& pi, int p, int q) {
  pi.validate();
  if (pi.convention != SignConvention::ar)
    throw std::invalid_argument("identify: the filter must be AR-convention");
  if (p < 0 || q < 0)
    throw std::invalid_argument("identify: orders must be non-negative");
  const int d = pi.dim;
  const int k = pi.order();
  const int K = std::max(p, q + k);
  const int d2 = d * d;

  ConstraintSystem cs;
  cs.M = Eigen::MatrixXd::Zero(K * d2, (p + q) * d2);
  cs.c = Eigen::VectorXd::Zero(K * d2);

  for (int j = 1; j <= K; ++j) {
    const int row0 = (j - 1) * d2;
    if (j <= k)
      for (int r = 0; r < d; ++r)
        for (int cc = 0; cc < d; ++cc)
          cs.c(row0 + r * d + cc) = pi.coeffs[j - 1](r, cc);
    if (j <= p)
      for (int e = 0; e < d2; ++e) cs.M(row0 + e, (j - 1) * d2 + e) += 1.0;
    if (j <= q)
      for (int e = 0; e < d2; ++e)
        cs.M(row0 + e, (p + j - 1) * d2 + e) += 1.0;
    // product term: coefficient of lag j in Theta(L) (-sum Pi_tau L^tau)
    const int mmax = std::min(j - 1, q);
    for (int m = 1; m <= mmax; ++m) {
      const int tau = j - m;
      if (tau > k) continue;
      const Eigen::MatrixXd& P = pi.coeffs[tau - 1];
      for (int r = 0; r < d; ++r)
        for (int cc = 0; cc < d; ++cc)
          for (int s = 0; s < d; ++s)
            cs.M(row0 + r * d + cc, (p + m - 1) * d2 + r * d + s) -= P(s, cc);
    }
  }
  return cs;
}

namespace {

// x layout <-> coefficient blocks (d x d*lags, lag-major columns)
Eigen::MatrixXd segment_to_block(const Eigen::VectorXd& x, int offset, int d,
                                 int lags) {
  Eigen::MatrixXd B(d, d * lags);
  for (int l = 0; l < lags; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        B(i, l * d + j) = x(offset + l * d * d + i * d + j);
  return B;
}

struct DrState {
  IdentTarget target;
  Eigen::VectorXd z;  // splitting variable, reusable as a warm start
};

DrState solve_with_alpha(const IdentProblem& problem, double alpha,
                         const IdentOptions& opt,
                         const std::optional<Eigen::VectorXd>& warm) {
  const int d = problem.pi.dim;
  const int d2 = d * d;
  const int N = (problem.p + problem.q) * d2;
  const ConstraintSystem cs =
      build_constraints(problem.pi, problem.p, problem.q);

  DrState st;
  st.target.alpha_used = alpha;
  if (N == 0) {
    st.target.phi.resize(d, 0);
    st.target.theta.resize(d, 0);
    st.target.constraint_violation =
        cs.c.size() ? cs.c.lpNorm<Eigen::Infinity>() : 0.0;
    if (st.target.constraint_violation > 1e-6)
      throw std::domain_error(
          "identify: no representation with p = q = 0 matches the filter "
          "(residual " +
          std::to_string(st.target.constraint_violation) + ")");
    st.z.resize(0);
    return st;
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(cs.M);
  auto project = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x - cod.solve((cs.M * x - cs.c).eval());
  };

  {
    const Eigen::VectorXd z0 = project(Eigen::VectorXd::Zero(N));
    const double resid = (cs.M * z0 - cs.c).lpNorm<Eigen::Infinity>();
    if (resid > 1e-6)
      throw std::domain_error(
          "identify: no model of the requested orders matches the filter "
          "(projection residual " +
          std::to_string(resid) + ")");
  }

  const double t = opt.step;
  if (!(t > 0)) throw std::invalid_argument("identify: step must be > 0");
  const double shrink = 1.0 / (1.0 + t * alpha);
  const double teff = t * shrink;

  auto prox_g = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    Eigen::VectorXd v = shrink * u;
    if (problem.p > 0) {
      Eigen::RowVectorXd seg = v.head(problem.p * d2).transpose();
      prox_inplace(problem.penalty, seg, teff, d2, problem.p);
      v.head(problem.p * d2) = seg.transpose();
    }
    if (problem.q > 0) {
      Eigen::RowVectorXd seg = v.tail(problem.q * d2).transpose();
      prox_inplace(problem.penalty, seg, teff, d2, problem.q);
      v.tail(problem.q * d2) = seg.transpose();
    }
    return v;
  };

  Eigen::VectorXd z =
      warm ? *warm : (opt.init ? *opt.init : Eigen::VectorXd::Zero(N));
  if (z.size() != N)
    throw std::invalid_argument("identify: init has the wrong length");
  Eigen::VectorXd x(N), y(N);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    x = prox_g(z);
    y = project(2.0 * x - z);
    z += y - x;
    const double gap = (x - y).lpNorm<Eigen::Infinity>();
    if (gap <= opt.tol) break;
  }
  if (it == opt.max_iter)
    throw std::runtime_error(
        "identify: splitting iteration did not reach tolerance " +
        std::to_string(opt.tol) + " in " + std::to_string(opt.max_iter) +
        " iterations");

  st.target.phi = segment_to_block(y, 0, d, problem.p);
  st.target.theta = segment_to_block(y, problem.p * d2, d, problem.q);
  st.target.constraint_violation = (cs.M * y - cs.c).lpNorm<Eigen::Infinity>();
  st.target.objective = penalty_value(problem.penalty, st.target.phi, problem.p) +
                        penalty_value(problem.penalty, st.target.theta,
                                      problem.q) +
                        0.5 * alpha * y.squaredNorm();
  st.target.iterations = it + 1;
  st.z = std::move(z);
  return st;
}

}  // namespace

IdentTarget solve_target(const IdentProblem& problem,
                         const IdentOptions& options) {
  if (!(problem.alpha > 0))
    throw std::invalid_argument(
        "solve_target: alpha must be > 0 (use limit_target for the limit)");
  return solve_with_alpha(problem, problem.alpha, options, std::nullopt).target;
}

IdentTarget limit_target(const IdentProblem& problem,
                         const IdentOptions& options) {
  std::optional<Eigen::VectorXd> warm;
  std::optional<IdentTarget> prev;
  std::ostringstream trajectory;
  for (int dec = 1; dec <= 8; ++dec) {
    const double alpha = std::pow(10.0, -dec);
    DrState st = solve_with_alpha(problem, alpha, options, warm);
    warm = st.z;
    if (prev) {
      const double delta =
          std::sqrt((st.target.phi - prev->phi).squaredNorm() +
                    (st.target.theta - prev->theta).squaredNorm());
      trajectory << (dec > 2 ? ", " : "") << delta;
      if (delta < 1e-5) {
        st.target.alpha_used = 0.0;
        st.target.objective =
            penalty_value(problem.penalty, st.target.phi, problem.p) +
            penalty_value(problem.penalty, st.target.theta, problem.q);
        return st.target;
      }
    }
    prev = st.target;
  }
  throw std::runtime_error(
      "limit_target: targets kept moving across 8 ridge decades "
      "(successive Frobenius gaps: " +
      trajectory.str() + ")");
}

}  // namespace varma
