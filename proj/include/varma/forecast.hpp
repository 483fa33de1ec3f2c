#pragma once

#include "varma/pipeline.hpp"
#include "varma/types.hpp"

namespace varma {

/// Recursive plug-in forecast on raw coefficient blocks.  phi is d x (d*p),
/// theta d x (d*q); y_hist rows are time with the forecast origin last;
/// innov_hist rows align with the *tail* of y_hist (its last row is the
/// innovation estimate at the origin).  Future innovations are zero, so MA
/// terms fall out of the recursion after q steps.  Returns h x d.
Eigen::MatrixXd forecast_recursive(const Eigen::MatrixXd& phi,
                                   const Eigen::MatrixXd& theta,
                                   const Eigen::MatrixXd& y_hist,
                                   const Eigen::MatrixXd& innov_hist, int h);

/// Forecast from known model coefficients and innovation history (data
/// scale, no standardization involved).
Eigen::MatrixXd forecast_h(const VarmaModel& model,
                           const Eigen::MatrixXd& y_hist,
                           const Eigen::MatrixXd& innov_hist, int h);

/// Forecast from a first-phase (pure VAR) fit; `history` must be the sample
/// the fit was produced on (or one extended consistently).  Standardization
/// is applied and inverted internally.
Eigen::MatrixXd forecast_h(const Phase1Result& fit, const PanelData& history,
                           int h);

/// Forecast from a completed two-phase fit, using its stored innovation
/// estimates for the MA terms.
Eigen::MatrixXd forecast_h(const TwoPhaseFit& fit, const PanelData& history,
                           int h);

}  // namespace varma
