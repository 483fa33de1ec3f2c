#pragma once

#include <functional>
#include <string>
#include <vector>

#include "varma/types.hpp"

namespace varma {

/// Mean squared forecast error: mean over rows of |actual - forecast|^2 / d.
double msfe(const Eigen::MatrixXd& actual, const Eigen::MatrixXd& forecast);

/// One tuning point of a grid search; `lambda_total` and `lambda_theta`
/// order the points for the one-standard-error rule (most regularised =
/// largest total weight, ties broken towards the larger MA weight).
struct CvGridPoint {
  double lambda_total = 0.0;
  double lambda_theta = 0.0;
};

/// Selection rule: `one_se` picks the most regularised point whose mean
/// loss is within one standard error of the minimiser, `min` the minimiser
/// itself.
enum class CvRule { one_se, min };

struct CvReport {
  std::vector<CvGridPoint> points;
  std::vector<double> msfe;  // per point, averaged over origins
  std::vector<double> se;    // std over origins / sqrt(#origins)
  int min_index = -1;
  int chosen = -1;  // pick under `rule`
  CvRule rule = CvRule::one_se;
  int origins = 0;
  int first_origin = 0;  // training size of the first origin
};

/// forecaster(t) fits on the first t rows of the data and returns a G x d
/// matrix of h-step forecasts of row t+h-1, one row per grid point.
using GridForecaster = std::function<Eigen::MatrixXd(int t)>;

/// Rolling-origin selection: origins t = S .. T-h (training sizes), squared
/// error per origin and grid point, pick under `rule`.  S < 0 means the
/// default floor(0.9 T).  Fewer than two origins is an error.
CvReport cv_select(const PanelData& data, const GridForecaster& forecaster,
                   const std::vector<CvGridPoint>& points, int h, int S = -1,
                   CvRule rule = CvRule::one_se);

struct DmResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Diebold-Mariano test of equal forecast accuracy on the squared-error
/// loss differential d_t = errors_a[t]^2 - errors_b[t]^2, long-run variance
/// with a rectangular kernel of h-1 lags, two-sided normal p-value.
/// Identical series give statistic 0 / p 1; a nonpositive long-run variance
/// with a nonzero mean differential is a degeneracy error.
DmResult dm_test(const std::vector<double>& errors_a,
                 const std::vector<double>& errors_b, int h);

/// Paired two-sided t-test on the differences a[i] - b[i].
struct TTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
TTestResult paired_ttest(const std::vector<double>& a,
                         const std::vector<double>& b);

/// Maximum selected lag per (equation, series) pair of a coefficient block
/// laid out as `lags` d x d blocks side by side; 0 = no lag selected.
Eigen::MatrixXi lag_matrix(const Eigen::MatrixXd& block, int lags,
                           double zero_tol = 1e-8);

/// Joint sparsity summary of a fit's AR and MA sides.
struct LagMatrixReport {
  Eigen::MatrixXi ar_lags;  // 0 x 0 when the fit has no AR part
  Eigen::MatrixXi ma_lags;  // 0 x 0 when the fit has no MA part
  int nonzero_count = 0;    // coefficients above zero_tol, both sides
  int total_params = 0;     // d^2 (p + q)
};

LagMatrixReport lag_report(const Eigen::MatrixXd& phi_block, int p,
                           const Eigen::MatrixXd& theta_block, int q,
                           double zero_tol = 1e-8);

/// Aligned text grid of a lag matrix, one row per equation.
std::string render_lag_matrix(const Eigen::MatrixXi& L,
                              const std::vector<std::string>& names = {});

struct EvalEstimator {
  std::string name;
  /// Fit on `train` and return an (max horizon) x d matrix whose row s-1 is
  /// the s-step-ahead forecast from the end of the training sample.
  std::function<Eigen::MatrixXd(const PanelData& train, int max_h)> forecast;
};

struct EvalResult {
  std::vector<std::string> names;
  std::vector<int> horizons;
  Eigen::MatrixXd msfe_table;  // estimator x horizon, over clean origins
  /// losses[e][k][o]: squared error of estimator e at horizon horizons[k]
  /// and origin o (NaN where the estimator failed at that origin).
  std::vector<std::vector<std::vector<double>>> losses;
  std::vector<int> failures;  // per-estimator failed-origin count
  int first_origin = 0;
};

/// Expanding-window comparison: origins t = S .. T-h per horizon, each
/// estimator refit on the first t rows.  S < 0 means floor(0.75 T), so
/// forecasts cover roughly the last quarter of the sample.  Estimator
/// failures at an origin are recorded and excluded pairwise, not fatal.
EvalResult expanding_window_eval(const PanelData& data,
                                 const std::vector<EvalEstimator>& estimators,
                                 const std::vector<int>& horizons, int S = -1);

}  // namespace varma
