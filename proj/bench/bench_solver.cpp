#include <benchmark/benchmark.h>

#include "varma/simulate.hpp"
#include "varma/solver.hpp"

namespace {

struct Problem {
  Eigen::MatrixXd Y, Z, X, init_phi, init_theta;
  varma::PenaltySpec spec;
  varma::SolverOptions options;
  double step = 0.0;
};

// Representative multi-row problem: a simulated path from the study
// generator regressed on its own lags at a mid-grid penalty weight.
Problem make_problem(int d, int T, int p) {
  varma::DgpSpec dgp;
  dgp.d = d;
  const varma::VarmaModel model = varma::build_dgp(dgp);
  const varma::SimulatedPath sim = varma::simulate_path(model, T, 200, 42);
  const Eigen::MatrixXd& sv = sim.observations.values;

  Problem pr;
  const int n = T - p;
  pr.Y.resize(d, n);
  pr.Z.resize(d * p, n);
  pr.X.resize(0, n);
  for (int c = 0; c < n; ++c) {
    pr.Y.col(c) = sv.row(p + c).transpose();
    for (int l = 1; l <= p; ++l)
      pr.Z.block((l - 1) * d, c, d, 1) = sv.row(p + c - l).transpose();
  }
  pr.init_phi = Eigen::MatrixXd::Zero(d, d * p);
  pr.init_theta = Eigen::MatrixXd::Zero(d, 0);
  pr.step = varma::spectral_step(pr.Z, pr.X);
  pr.spec = {varma::PenaltyKind::hlag, varma::lambda_max(pr.Y, pr.Z) / 10.0,
             0.0, 0.0};
  return pr;
}

void run_parallel(benchmark::State& state) {
  const Problem pr =
      make_problem(static_cast<int>(state.range(0)), 400, 12);
  for (auto _ : state) {
    varma::MultiRowFit fit =
        varma::solve_all_rows(pr.Y, pr.Z, pr.X, pr.spec, pr.options,
                              pr.init_phi, pr.init_theta, pr.step);
    benchmark::DoNotOptimize(fit.phi.data());
  }
}

void run_serial(benchmark::State& state) {
  const Problem pr =
      make_problem(static_cast<int>(state.range(0)), 400, 12);
  for (auto _ : state) {
    varma::MultiRowFit fit =
        varma::solve_all_rows_serial(pr.Y, pr.Z, pr.X, pr.spec, pr.options,
                                     pr.init_phi, pr.init_theta, pr.step);
    benchmark::DoNotOptimize(fit.phi.data());
  }
}

}  // namespace

BENCHMARK(run_parallel)->Arg(10)->Arg(20)->Arg(40)
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(run_serial)->Arg(10)->Arg(20)->Arg(40)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
