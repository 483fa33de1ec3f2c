#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "varma/penalty.hpp"

namespace varma {

struct SolveDiagnostics {
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
  double final_delta_inf = 0.0;  // last max-norm change over both blocks
  int restarts = 0;
};

struct SolverOptions {
  double epsilon = 1e-4;  // max-norm change required of both blocks
  int max_iter = 10000;
  std::optional<double> l1_bound;  // joint l1 cap on [phi theta], off by default
};

/// One response row regressed on the stacked AR block Z (dp x n) and MA
/// block X (dq x n); either block may have zero rows.  `series` is d, used
/// for the lag-major group layout of the hierarchical penalty.
struct RowProblem {
  Eigen::Ref<const Eigen::RowVectorXd> y;
  Eigen::Ref<const Eigen::MatrixXd> Z;
  Eigen::Ref<const Eigen::MatrixXd> X;
  int series = 0;
  PenaltySpec penalty;
  double step = 0.0;  // <= 1 / sigma_1([Z;X])^2
  SolverOptions options;
};

struct RowSolution {
  Eigen::RowVectorXd phi;
  Eigen::RowVectorXd theta;
  SolveDiagnostics diag;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, std::vector<int> rows = {})
      : std::runtime_error(what), failed_rows(std::move(rows)) {}
  std::vector<int> failed_rows;
};

/// Inverse squared top singular value of the stacked regressor matrix
/// [Z; X], the largest gradient step that keeps the proximal iteration
/// stable.  Power iteration on A'A.  All-zero input is rejected.
double spectral_step(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& X);

/// Objective of one row: 0.5 |y - phi Z - theta X|^2 + lambda_phi P(phi)
/// + lambda_theta P(theta) + (alpha/2)(lambda_phi |phi|^2 + lambda_theta |theta|^2).
/// `series` fixes the lag-major group layout of both blocks.
double row_objective(const Eigen::Ref<const Eigen::RowVectorXd>& y,
                     const Eigen::Ref<const Eigen::MatrixXd>& Z,
                     const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::RowVectorXd>& phi,
                     const Eigen::Ref<const Eigen::RowVectorXd>& theta,
                     const PenaltySpec& spec, int series);

/// Accelerated proximal gradient with alternating phi/theta updates: the
/// theta step always uses the freshly updated phi.  Momentum restarts after
/// two consecutive objective increases; an objective blow-up past 1e3 x the
/// initial value throws SolverError.  Non-convergence within max_iter is
/// reported through the diagnostics, not an exception.
RowSolution solve_row(const RowProblem& prob,
                      const Eigen::Ref<const Eigen::RowVectorXd>& init_phi,
                      const Eigen::Ref<const Eigen::RowVectorXd>& init_theta);

struct MultiRowFit {
  Eigen::MatrixXd phi;    // d x dp
  Eigen::MatrixXd theta;  // d x dq
  std::vector<SolveDiagnostics> rows;
  bool all_converged = true;
};

/// All d rows of Y (d x n) against shared Z and X.  `step` <= 0 means
/// compute it here.  The parallel version distributes rows across OpenMP
/// threads; per-row arithmetic is identical to the serial reference, so
/// results do not depend on the thread count.
MultiRowFit solve_all_rows(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z,
                           const Eigen::MatrixXd& X, const PenaltySpec& spec,
                           const SolverOptions& options,
                           const Eigen::MatrixXd& init_phi,
                           const Eigen::MatrixXd& init_theta,
                           double step = 0.0);

MultiRowFit solve_all_rows_serial(const Eigen::MatrixXd& Y,
                                  const Eigen::MatrixXd& Z,
                                  const Eigen::MatrixXd& X,
                                  const PenaltySpec& spec,
                                  const SolverOptions& options,
                                  const Eigen::MatrixXd& init_phi,
                                  const Eigen::MatrixXd& init_theta,
                                  double step = 0.0);

}  // namespace varma
