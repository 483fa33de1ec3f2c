#include "varma/forecast.hpp"

#include <stdexcept>

namespace varma {

namespace {

int block_order(const Eigen::MatrixXd& B, int d, const char* what) {
  if (B.size() == 0) return 0;
  if (B.rows() != d || B.cols() % d != 0)
    throw std::invalid_argument(std::string("forecast: bad ") + what +
                                " block shape");
  return static_cast<int>(B.cols()) / d;
}

Eigen::MatrixXd poly_to_block(const LagPolynomial& poly) {
  const int d = poly.dim;
  const int s = poly.order();
  Eigen::MatrixXd B(d, d * s);
  for (int l = 0; l < s; ++l) B.middleCols(l * d, d) = poly.coeffs[l];
  return B;
}

}  // namespace

Eigen::MatrixXd forecast_recursive(const Eigen::MatrixXd& phi,
                                   const Eigen::MatrixXd& theta,
                                   const Eigen::MatrixXd& y_hist,
                                   const Eigen::MatrixXd& innov_hist, int h) {
  const int d = static_cast<int>(y_hist.cols());
  if (d < 1) throw std::invalid_argument("forecast: empty history");
  if (h < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
  const int p = block_order(phi, d, "AR");
  const int q = block_order(theta, d, "MA");
  const int n = static_cast<int>(y_hist.rows());
  if (n < p)
    throw std::invalid_argument("forecast: history shorter than the AR order");
  const int k = static_cast<int>(innov_hist.rows());
  if (k > 0 && innov_hist.cols() != d)
    throw std::invalid_argument("forecast: innovation dimension mismatch");

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(h, d);
  for (int s = 1; s <= h; ++s) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (int l = 1; l <= p; ++l) {
      const int idx = n - 1 + s - l;  // time index in the extended history
      const Eigen::RowVectorXd lagged =
          idx <= n - 1 ? Eigen::RowVectorXd(y_hist.row(idx))
                       : Eigen::RowVectorXd(out.row(idx - n));
      acc.noalias() += phi.middleCols((l - 1) * d, d) * lagged.transpose();
    }
    for (int m = 1; m <= q; ++m) {
      const int idx = n - 1 + s - m;
      if (idx > n - 1) continue;  // future innovations are zero
      const int r = idx - (n - k);  // innov_hist row, tail-aligned
      if (r < 0) continue;          // before the recorded innovations
      acc.noalias() +=
          theta.middleCols((m - 1) * d, d) * innov_hist.row(r).transpose();
    }
    out.row(s - 1) = acc.transpose();
  }
  return out;
}

Eigen::MatrixXd forecast_h(const VarmaModel& model,
                           const Eigen::MatrixXd& y_hist,
                           const Eigen::MatrixXd& innov_hist, int h) {
  model.validate();
  if (y_hist.cols() != model.dim())
    throw std::invalid_argument("forecast: history dimension mismatch");
  const Eigen::MatrixXd phi = poly_to_block(model.phi);
  const Eigen::MatrixXd theta = poly_to_block(model.theta);
  return forecast_recursive(phi, theta, y_hist, innov_hist, h);
}

Eigen::MatrixXd forecast_h(const Phase1Result& fit, const PanelData& history,
                           int h) {
  history.validate();
  const Eigen::MatrixXd sv = apply_scaling(history.values, fit.scaling);
  if (sv.cols() * fit.p_tilde != fit.pi_hat.cols())
    throw std::invalid_argument("forecast: history dimension mismatch");
  const Eigen::MatrixXd fc = forecast_recursive(
      fit.pi_hat, Eigen::MatrixXd(sv.cols(), 0), sv, Eigen::MatrixXd(0, 0), h);
  return invert_scaling(fc, fit.scaling);
}

Eigen::MatrixXd forecast_h(const TwoPhaseFit& fit, const PanelData& history,
                           int h) {
  history.validate();
  const Eigen::MatrixXd sv = apply_scaling(history.values, fit.phase2.scaling);
  const int T = static_cast<int>(sv.rows());
  if (fit.innovations.rows() > 0 &&
      fit.innovations_start + fit.innovations.rows() != T)
    throw std::invalid_argument(
        "forecast: history does not match the fitted sample");
  const Eigen::MatrixXd fc = forecast_recursive(
      fit.phase2.phi_hat, fit.phase2.theta_hat, sv, fit.innovations, h);
  return invert_scaling(fc, fit.phase2.scaling);
}

}  // namespace varma
