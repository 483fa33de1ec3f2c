#pragma once

#include <optional>

#include "varma/evaluate.hpp"
#include "varma/solver.hpp"
#include "varma/types.hpp"

namespace varma {

/// Per-series affine transform used when fitting standardized data.
struct Scaling {
  bool standardized = false;
  Eigen::VectorXd mean;  // size d
  Eigen::VectorXd sd;    // size d, all 1 when standardized = false
  bool degenerate = false;  // some series had (near) zero variance
};

Scaling compute_scaling(const Eigen::MatrixXd& values, bool standardize);
Eigen::MatrixXd apply_scaling(const Eigen::MatrixXd& values, const Scaling& s);
Eigen::MatrixXd invert_scaling(const Eigen::MatrixXd& values, const Scaling& s);

struct Orders {
  int p_tilde = 0;  // long autoregression order of the first phase
  int p = 0;        // AR order of the second phase
  int q = 0;        // MA order of the second phase
};

/// Rate-driven defaults: p_tilde = floor(1.5 sqrt(T)) capped at floor(T/2),
/// p = q = floor(0.75 sqrt(T)).  T < 4 leaves no room for any lag.
Orders default_orders(int T);

struct CvOptions {
  int h = 1;
  int S = -1;  // < 0: floor(0.9 T)
  CvRule rule = CvRule::one_se;
};

struct Phase1Result {
  Eigen::MatrixXd pi_hat;  // d x (d * p_tilde), fitting scale
  int p_tilde = 0;
  double lambda = 0.0;
  Eigen::MatrixXd residuals;  // (T - p_tilde) x d, fitting scale
  int residual_start = 0;     // 0-based time of the first residual row
  Scaling scaling;
  CvReport cv;
  std::vector<SolveDiagnostics> diagnostics;
  bool degenerate_regressors = false;
};

struct Phase2Result {
  Eigen::MatrixXd phi_hat;    // d x (d*p)
  Eigen::MatrixXd theta_hat;  // d x (d*q)
  int p = 0, q = 0;
  double lambda_phi = 0.0, lambda_theta = 0.0;
  Eigen::MatrixXd residuals;  // fitting scale, first row = residual_start
  int residual_start = 0;
  Scaling scaling;
  CvReport cv;
  std::vector<SolveDiagnostics> diagnostics;
};

struct FitConfig {
  PenaltyKind penalty = PenaltyKind::hlag;
  std::optional<Orders> orders;  // default: default_orders(T)
  int grid_size = 10;
  double alpha = 0.0;     // ridge perturbation weight, usually 0
  bool standardize = true;
  CvOptions cv;
  SolverOptions solver;
  /// Replace the second-phase response by the first phase's fitted values
  /// instead of the observations (alternative regression target).
  bool fitted_response = false;
  /// Externally supplied innovations (T x d, data scale).  When set the
  /// first phase is skipped and the MA regressors are built from these.
  std::optional<Eigen::MatrixXd> innovations;
};

struct TwoPhaseFit {
  PenaltyKind penalty = PenaltyKind::hlag;
  Orders orders;
  std::optional<Phase1Result> phase1;  // absent with oracle innovations
  Phase2Result phase2;
  /// Innovation series the MA regressors were built from (fitting scale);
  /// row r holds the innovation at time innovations_start + r.  Empty when
  /// the fit had no MA part.
  Eigen::MatrixXd innovations;
  int innovations_start = 0;
};

/// Penalised long autoregression of order p_tilde; the grid over the
/// penalty weight is selected by rolling-origin one-SE.  Residuals are the
/// one-step errors of the selected fit over t = p_tilde .. T-1.
Phase1Result phase1_fit(const PanelData& data, int p_tilde, PenaltyKind kind,
                        double alpha = 0.0, const CvOptions& cv = {},
                        const SolverOptions& solver = {},
                        bool standardize = true, int grid_size = 10);

///// Second phase: regression of y_t on its own lags and lagged innovation
/// estimates, a 2-d penalty grid selected by rolling-origin one-SE on the
/// total weight (ties prefer the larger MA weight).
Phase2Result phase2_fit(const PanelData& data, const Phase1Result& first,
                        int p, int q, PenaltyKind kind, double alpha = 0.0,
                        const CvOptions& cv = {},
                        const SolverOptions& solver = {}, int grid_size = 10);

TwoPhaseFit two_phase_fit(const PanelData& data, const FitConfig& config = {});

}  // namespace varma
