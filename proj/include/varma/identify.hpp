#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>

#include "varma/penalty.hpp"
#include "varma/types.hpp"

namespace varma {

/// A finite-order VAR filter plus the representation orders to identify at.
/// The coefficient-matching identity Phi(L) = Theta(L) Pi(L) is enforced
/// through the largest lag with a nonzero coefficient on either side.
struct IdentProblem {
  LagPolynomial pi;  // convention ar, order k
  int p = 0;
  int q = 0;
  PenaltyKind penalty = PenaltyKind::l1;
  double alpha = 0.0;  // ridge weight; solve_target needs > 0

  int constraint_order() const { return std::max(p, q + pi.order()); }
};

/// The penalty-minimal representation at the requested orders.
struct IdentTarget {
  Eigen::MatrixXd phi;    // d x (d p)
  Eigen::MatrixXd theta;  // d x (d q)
  double alpha_used = 0.0;
  double constraint_violation = 0.0;  // max-norm residual of the matching
  double objective = 0.0;  // P_AR + P_MA + (alpha/2) squared norm at target
  int iterations = 0;
};

/// Affine system M x = c over x = (vec Phi_1..Phi_p, vec Theta_1..Theta_q),
/// entry layout (lag-1)*d^2 + row*d + col within each side.
struct ConstraintSystem {
  Eigen::MatrixXd M;
  Eigen::VectorXd c;
};

/// Coefficient-matching equations of Phi(L) = Theta(L) Pi(L) for lags
/// 1..max(p, q + k); lags beyond the filter order use a zero right side.
ConstraintSystem build_constraints(const LagPolynomial& pi, int p, int q);

struct IdentOptions {
  double step = 1.0;    // proximal step of the splitting iteration
  int max_iter = 100000;
  double tol = 1e-8;    // gap tolerance between the two half-steps
  /// Optional start point (used by the uniqueness property test); default
  /// is the origin, which keeps repeated invocations bitwise identical.
  std::optional<Eigen::VectorXd> init;
};

/// Minimize P_AR(Phi) + P_MA(Theta) + (alpha/2)(|Phi|_F^2 + |Theta|_F^2)
/// subject to the matching equations, by alternating an affine projection
/// (precomputed least-squares factorization) with the penalty+ridge prox.
/// Requires problem.alpha > 0; throws std::domain_error when no model of
/// the requested orders matches the filter (projection residual > 1e-6).
IdentTarget solve_target(const IdentProblem& problem,
                         const IdentOptions& options = {});

/// alpha -> 0 limit: runs solve_target along alpha = 1e-1, 1e-2, ... with
/// warm starts until successive targets differ by < 1e-5 in Frobenius norm;
/// errors after 8 decades without convergence.  The reported objective is
/// the pure penalty value (alpha_used = 0).
IdentTarget limit_target(const IdentProblem& problem,
                         const IdentOptions& options = {});

}  // namespace varma
