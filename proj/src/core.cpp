#include "varma/core.hpp"

#include <Eigen/Eigenvalues>

namespace varma {

void VarmaModel::validate() const {
  phi.validate();
  theta.validate();
  if (phi.convention != SignConvention::ar)
    throw std::invalid_argument("model: phi must use the ar convention");
  if (theta.convention != SignConvention::ma)
    throw std::invalid_argument("model: theta must use the ma convention");
  if (theta.dim != phi.dim)
    throw std::invalid_argument("model: phi/theta dimension mismatch");
  if (sigma_a.rows() != phi.dim || sigma_a.cols() != phi.dim)
    throw std::invalid_argument("model: sigma_a dimension mismatch");
  if (!sigma_a.allFinite())
    throw std::invalid_argument("model: non-finite sigma_a");
  if (!sigma_a.isApprox(sigma_a.transpose(), 1e-12))
    throw std::invalid_argument("model: sigma_a not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_a);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("model: sigma_a not positive definite");
}

namespace {

// Block companion matrix [B1 .. Bs; I 0] of the blocks B_l.
Eigen::MatrixXd companion(const std::vector<Eigen::MatrixXd>& blocks, int d) {
  const int s = static_cast<int>(blocks.size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d * s, d * s);
  for (int l = 0; l < s; ++l) C.block(0, l * d, d, d) = blocks[l];
  if (s > 1)
    C.block(d, 0, d * (s - 1), d * (s - 1)) =
        Eigen::MatrixXd::Identity(d * (s - 1), d * (s - 1));
  return C;
}

SpectralReport companion_report(const std::vector<Eigen::MatrixXd>& blocks, int d) {
  if (blocks.empty()) return {true, 0.0};
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion(blocks, d), false);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  return {radius < 1.0 - kSpectralMargin, radius};
}

}  // namespace

SpectralReport check_stable(const LagPolynomial& ar_poly) {
  ar_poly.validate();
  if (ar_poly.convention != SignConvention::ar)
    throw std::invalid_argument("check_stable expects an ar polynomial");
  return companion_report(ar_poly.coeffs, ar_poly.dim);
}

SpectralReport check_invertible(const LagPolynomial& ma_poly) {
  ma_poly.validate();
  if (ma_poly.convention != SignConvention::ma)
    throw std::invalid_argument("check_invertible expects an ma polynomial");
  // Roots of det(I + sum Theta_m z^m) lie outside the unit circle exactly
  // when the companion matrix of the blocks (-Theta_m) has radius < 1.
  std::vector<Eigen::MatrixXd> flipped;
  flipped.reserve(ma_poly.coeffs.size());
  for (const auto& c : ma_poly.coeffs) flipped.push_back(-c);
  return companion_report(flipped, ma_poly.dim);
}

LagPolynomial invert_to_var(const VarmaModel& model, int k) {
  model.validate();
  if (k < 0) throw std::invalid_argument("invert_to_var: k must be >= 0");
  if (!check_invertible(model.theta).ok)
    throw std::domain_error("invert_to_var: model is not invertible");

  const int d = model.dim();
  const int p = model.p();
  const int q = model.q();
  // Matching coefficients in Theta(L) Pi(L) = Phi(L) gives
  //   Pi_tau = Phi_tau 1{tau<=p} + Theta_tau 1{tau<=q}
  //            - sum_{m=1}^{min(tau-1,q)} Theta_m Pi_{tau-m}.
  std::vector<Eigen::MatrixXd> pi(k);
  for (int tau = 1; tau <= k; ++tau) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    if (tau <= p) acc += model.phi.coeffs[tau - 1];
    if (tau <= q) acc += model.theta.coeffs[tau - 1];
    for (int m = 1; m <= std::min(tau - 1, q); ++m)
      acc -= model.theta.coeffs[m - 1] * pi[tau - m - 1];
    pi[tau - 1] = std::move(acc);
  }
  return LagPolynomial::ar(d, std::move(pi));
}

std::vector<Eigen::MatrixXd> ma_weights(const LagPolynomial& pi, int count) {
  pi.validate();
  if (pi.convention != SignConvention::ar)
    throw std::invalid_argument("ma_weights expects an ar polynomial");
  if (count < 1) throw std::invalid_argument("ma_weights: count must be >= 1");
  const int d = pi.dim;
  std::vector<Eigen::MatrixXd> psi(count);
  psi[0] = Eigen::MatrixXd::Identity(d, d);
  for (int j = 1; j < count; ++j) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    for (int tau = 1; tau <= std::min(j, pi.order()); ++tau)
      acc += pi.coeffs[tau - 1] * psi[j - tau];
    psi[j] = std::move(acc);
  }
  return psi;
}

Eigen::MatrixXd autocovariance(const std::vector<Eigen::MatrixXd>& psi,
                               const Eigen::MatrixXd& sigma_a, int h) {
  if (psi.empty()) throw std::invalid_argument("autocovariance: empty weights");
  if (h < 0) throw std::invalid_argument("autocovariance: h must be >= 0");
  const int d = static_cast<int>(sigma_a.rows());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t j = 0; j + h < psi.size(); ++j)
    acc += psi[j] * sigma_a * psi[j + h].transpose();
  return acc;
}

bool pi_equivalent(const VarmaModel& a, const VarmaModel& b, int k, double tol) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("pi_equivalent: dimension mismatch");
  const LagPolynomial pa = invert_to_var(a, k);
  const LagPolynomial pb = invert_to_var(b, k);
  for (int tau = 0; tau < k; ++tau)
    if (((pa.coeffs[tau] - pb.coeffs[tau]).cwiseAbs().maxCoeff()) > tol)
      return false;
  return true;
}

double yule_walker_residual(const VarmaModel& model, const LagPolynomial& pi,
                            int k) {
  model.validate();
  pi.validate();
  if (pi.dim != model.dim())
    throw std::invalid_argument("yule_walker_residual: dimension mismatch");
  if (k < 1) throw std::invalid_argument("yule_walker_residual: k must be >= 1");
  if (!check_stable(model.phi).ok)
    throw std::domain_error("yule_walker_residual: model is not stable");
  if (!check_invertible(model.theta).ok)
    throw std::domain_error("yule_walker_residual: model is not invertible");

  const int d = model.dim();
  const int p = model.p();
  const int q = model.q();
  if (p + q == 0) return 0.0;  // no coefficients, nothing to violate

  const Eigen::MatrixXd& sig = model.sigma_a;
  const int maxlag = std::max(p, q);
  const auto psi = ma_weights(pi, k + maxlag + 1);

  // Gamma(h) = E[y_t y_{t+h}'] for h = 0..p; negative lags via transpose.
  std::vector<Eigen::MatrixXd> gamma(p + 1);
  for (int h = 0; h <= p; ++h) gamma[h] = autocovariance(psi, sig, h);
  auto gamma_at = [&](int h) -> Eigen::MatrixXd {
    return h >= 0 ? gamma[h] : Eigen::MatrixXd(gamma[-h].transpose());
  };

  const int m = d * (p + q);
  Eigen::MatrixXd sigma_z(m, m);
  Eigen::MatrixXd rho_zy(m, d);

  // z_t = [y_{t-1}; ..; y_{t-p}; a_{t-1}; ..; a_{t-q}].
  for (int i = 1; i <= p; ++i) {
    rho_zy.block((i - 1) * d, 0, d, d) = gamma_at(i);           // E[y_{t-i} y_t']
    for (int j = 1; j <= p; ++j)
      sigma_z.block((i - 1) * d, (j - 1) * d, d, d) = gamma_at(i - j);
    for (int mm = 1; mm <= q; ++mm) {
      Eigen::MatrixXd blk = mm >= i ? Eigen::MatrixXd(psi[mm - i] * sig)
                                    : Eigen::MatrixXd::Zero(d, d);
      sigma_z.block((i - 1) * d, (p + mm - 1) * d, d, d) = blk;
      sigma_z.block((p + mm - 1) * d, (i - 1) * d, d, d) = blk.transpose();
    }
  }
  for (int mm = 1; mm <= q; ++mm) {
    rho_zy.block((p + mm - 1) * d, 0, d, d) = sig * psi[mm].transpose();
    for (int nn = 1; nn <= q; ++nn)
      sigma_z.block((p + mm - 1) * d, (p + nn - 1) * d, d, d) =
          mm == nn ? sig : Eigen::MatrixXd::Zero(d, d);
  }

  // beta = [Phi_1 : .. : Phi_p : Theta_1 : .. : Theta_q]'.
  Eigen::MatrixXd beta(m, d);
  for (int l = 1; l <= p; ++l)
    beta.block((l - 1) * d, 0, d, d) = model.phi.coeffs[l - 1].transpose();
  for (int mm = 1; mm <= q; ++mm)
    beta.block((p + mm - 1) * d, 0, d, d) = model.theta.coeffs[mm - 1].transpose();

  return (rho_zy - sigma_z * beta).cwiseAbs().maxCoeff();
}

}  // namespace varma
