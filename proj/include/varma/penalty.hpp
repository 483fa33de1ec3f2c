#pragma once

#include <Eigen/Dense>
#include <vector>

namespace varma {

enum class PenaltyKind { l1, hlag };

/// Regularisation bundle for one two-block problem.  alpha is the ridge
/// perturbation weight; zero in ordinary fitting.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::l1;
  double lambda_phi = 0.0;
  double lambda_theta = 0.0;
  double alpha = 0.0;

  void validate() const {
    if (lambda_phi < 0 || lambda_theta < 0 || alpha < 0)
      throw std::invalid_argument("penalty: weights must be nonnegative");
  }
};

struct LambdaGrid {
  std::vector<double> values;  // strictly decreasing
};

/// Penalty of a coefficient block B laid out as `lag_count` d x d blocks side
/// by side (so B is d x (d*lag_count)).  l1 sums absolute entries; hlag sums,
/// over every (row, column) pair, the Euclidean norms of the suffix groups
/// (B_{l:s,ij})_{l=1..s} of its lag profile.
double penalty_value(PenaltyKind kind, const Eigen::MatrixXd& B, int lag_count);

/// Proximal map of t * penalty on one coefficient row of length
/// series*lags, lag-major layout (entry for series j at lag l sits at
/// (l-1)*series + j).  l1 is the entrywise soft threshold; hlag applies the
/// nested group soft threshold to each series profile, deepest suffix first.
void prox_inplace(PenaltyKind kind, Eigen::Ref<Eigen::RowVectorXd> v, double t,
                  int series, int lags);

/// Ridge shrinkage applied after the proximal step: v /= 1 + alpha*lambda.
void elastic_shrink_inplace(Eigen::Ref<Eigen::RowVectorXd> v, double alpha,
                            double lambda);

/// Smallest weight that zeroes every coefficient of the regression of Y on X
/// under l1: the largest absolute entry of X Y'.  Y is d x n, X is m x n.
double lambda_max(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X);

/// Log-linear grid from lmax down to lmax/100 (`size` points, size >= 2).
LambdaGrid make_grid(double lmax, int size = 10);

}  // namespace varma
