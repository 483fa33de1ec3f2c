#pragma once

#include <cstdint>
#include <optional>

#include "varma/types.hpp"

namespace varma {

/// Parameterised family used throughout the experiments: diagonal AR decay
/// Phi_l = (0.4/l) I for l = 1..p, banded MA Theta_m with theta/m on the
/// diagonal, theta/(10m) on the first off-diagonals and theta/(100m) on the
/// second.  sigma_a defaults to the identity.
struct DgpSpec {
  int d = 10;
  int p = 4;
  int q = 4;
  double theta = 0.8;
  std::optional<Eigen::MatrixXd> sigma_a;
};

/// Builds the model for a spec and verifies stability and invertibility
/// (std::domain_error when either fails).
VarmaModel build_dgp(const DgpSpec& spec);

/// The bivariate toy pair: two observationally equivalent VARMA(1,1) models.
/// dense=true returns the fully parameterised member, dense=false the sparse
/// one; both imply the same VAR(infinity) filter.
VarmaModel toy_model(bool dense);

struct SimulatedPath {
  PanelData observations;      // T x d, the retained sample
  Eigen::MatrixXd innovations; // T x d, the a_t that generated it
};

/// Gaussian simulation from zero initial state: burn_in + T steps, first
/// burn_in discarded.  Identical (model, T, burn_in, seed) give identical
/// bits.  Requires a stable and invertible model.
SimulatedPath simulate_path(const VarmaModel& model, int T, int burn_in,
                            std::uint64_t seed);

}  // namespace varma
