#pragma once

#include "varma/types.hpp"

namespace varma {

struct SpectralReport {
  bool ok = false;        // spectral radius < 1 - margin
  double radius = 0.0;    // largest companion eigenvalue modulus
};

/// Stability margin used by check_stable / check_invertible.
inline constexpr double kSpectralMargin = 1e-8;

/// Stability of the AR operator I - sum Phi_l L^l via the companion matrix
/// of the coefficient blocks.  Order 0 is trivially stable.
SpectralReport check_stable(const LagPolynomial& ar_poly);

/// Invertibility of the MA operator I + sum Theta_m L^m.  Same companion
/// test with the block signs flipped so the criterion is again radius < 1.
SpectralReport check_invertible(const LagPolynomial& ma_poly);

/// Pure-VAR representation of an invertible model: the first k coefficients
/// Pi_tau of Pi(L) = Theta(L)^{-1} Phi(L), convention ar.  Throws
/// std::domain_error when the model is not invertible.
LagPolynomial invert_to_var(const VarmaModel& model, int k);

/// Moving-average weights Psi_0..Psi_{count-1} of the process driven by the
/// VAR filter `pi` (convention ar): y_t = sum Pi_tau y_{t-tau} + a_t.
std::vector<Eigen::MatrixXd> ma_weights(const LagPolynomial& pi, int count);

/// Population autocovariance E[y_t y_{t+h}'] = sum_j Psi_j Sigma Psi_{j+h}'
/// from truncated MA weights.
Eigen::MatrixXd autocovariance(const std::vector<Eigen::MatrixXd>& psi,
                               const Eigen::MatrixXd& sigma_a, int h);

/// Do two models generate the same process?  Compares their VAR(infinity)
/// truncations through lag k, entrywise tolerance tol.
bool pi_equivalent(const VarmaModel& a, const VarmaModel& b, int k, double tol);

/// Max-norm violation of the moment equations that characterise membership
/// of (Phi, Theta) in the equivalence class of the VAR filter `pi`:
///   rho_zy = Sigma_z beta,  z_t = [y_{t-1}..y_{t-p}, a_{t-1}..a_{t-q}],
/// with all moments computed from the truncated MA representation (k terms).
/// The candidate (Phi, Theta, Sigma_a) comes from `model`; it must be stable
/// and invertible.
double yule_walker_residual(const VarmaModel& model, const LagPolynomial& pi,
                            int k);

}  // namespace varma
