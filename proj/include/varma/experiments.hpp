#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varma/evaluate.hpp"
#include "varma/pipeline.hpp"
#include "varma/simulate.hpp"

namespace varma {

/// Which experimental factor to sweep; `none` runs the base setting once.
enum class SweepKind { none, theta, q, d };

enum class EstimatorKind {
  varma_oracle_errors,  // true orders, true innovations as MA regressors
  varma_oracle_orders,  // true orders, first-phase residuals
  varma_default,        // default orders, first-phase residuals
  var_reference,        // long penalised autoregression
};

std::string estimator_name(EstimatorKind kind);

struct StudySpec {
  SweepKind sweep = SweepKind::theta;
  DgpSpec base;  // settings for factors not being swept
  int T = 100;
  int N = 50;  // replications per factor level
  std::vector<EstimatorKind> estimators = {
      EstimatorKind::varma_oracle_errors, EstimatorKind::varma_oracle_orders,
      EstimatorKind::varma_default, EstimatorKind::var_reference};
  PenaltyKind penalty = PenaltyKind::hlag;
  std::uint64_t master_seed = 1;
  int grid_size = 10;
  CvOptions cv;
  SolverOptions solver;
  int burn_in = 200;
};

/// One factor level: per-replication one-step squared errors and the
/// aggregates reported in the results table.
struct StudyCell {
  std::string factor;  // "theta", "q", "d" or "" for a plain run
  double level = 0.0;
  std::vector<std::string> names;      // estimator display names
  Eigen::MatrixXd errors;              // N x E, NaN where a fit failed
  std::vector<double> msfe;            // per estimator, over its clean reps
  std::vector<double> paired_stat;     // paired t vs the reference, NaN if n/a
  std::vector<double> paired_p;
  std::vector<int> failures;           // per-estimator failed replications
};

struct StudyResult {
  StudySpec spec;
  std::vector<StudyCell> cells;
};

/// Simulation study: per factor level, N replications of simulate (T+1
/// points, last held out), fit each estimator on the first T, one-step
/// forecast, squared error; aggregates means and paired t-tests of each
/// estimator against the long-autoregression reference.  Replication seeds
/// depend only on (master_seed, level, replication), never on the estimator
/// subset.  More than 10% failures for any estimator aborts the study.
StudyResult run_study(const StudySpec& spec);

}  // namespace varma
