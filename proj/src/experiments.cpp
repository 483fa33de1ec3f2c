#include "varma/experiments.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "varma/forecast.hpp"
#include "varma/rng.hpp"

namespace varma {

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::varma_oracle_errors: return "VARMA(p,q;a)";
    case EstimatorKind::varma_oracle_orders: return "VARMA(p,q;eps)";
    case EstimatorKind::varma_default: return "VARMA(phat,qhat;eps)";
    case EstimatorKind::var_reference: return "VAR(ptilde)";
  }
  throw std::invalid_argument("estimator_name: unknown kind");
}

namespace {

std::vector<double> sweep_levels(SweepKind sweep, const DgpSpec& base) {
  switch (sweep) {
    case SweepKind::none: return {0.0};
    case SweepKind::theta: return {0.0, 0.4, 0.6, 0.8};
    case SweepKind::q: return {4, 6, 8, 10};
    case SweepKind::d: return {5, 10, 20, 40};
  }
  (void)base;
  throw std::invalid_argument("run_study: unknown sweep");
}

std::string sweep_name(SweepKind sweep) {
  switch (sweep) {
    case SweepKind::none: return "";
    case SweepKind::theta: return "theta";
    case SweepKind::q: return "q";
    case SweepKind::d: return "d";
  }
  return "";
}

DgpSpec cell_dgp(const StudySpec& spec, double level) {
  DgpSpec dgp = spec.base;
  switch (spec.sweep) {
    case SweepKind::none: break;
    case SweepKind::theta: dgp.theta = level; break;
    case SweepKind::q: dgp.q = static_cast<int>(level); break;
    case SweepKind::d: dgp.d = static_cast<int>(level); break;
  }
  return dgp;
}

// One-step forecast of the held-out observation for one estimator.
Eigen::RowVectorXd estimator_forecast(EstimatorKind kind,
                                      const StudySpec& spec,
                                      const DgpSpec& dgp,
                                      const SimulatedPath& sim) {
  const int T = spec.T;
  PanelData train{sim.observations.values.topRows(T), {}};
  const Orders def = default_orders(T);
  const int q_true = dgp.theta == 0.0 ? 0 : dgp.q;  // zero MA scale: pure VAR

  FitConfig cfg;
  cfg.penalty = spec.penalty;
  cfg.grid_size = spec.grid_size;
  cfg.cv = spec.cv;
  cfg.solver = spec.solver;

  switch (kind) {
    case EstimatorKind::varma_oracle_errors:
      cfg.orders = Orders{def.p_tilde, dgp.p, q_true};
      cfg.innovations = sim.innovations.topRows(T);
      break;
    case EstimatorKind::varma_oracle_orders:
      cfg.orders = Orders{def.p_tilde, dgp.p, q_true};
      break;
    case EstimatorKind::varma_default:
      break;  // default orders from the sample size
    case EstimatorKind::var_reference: {
      const Phase1Result fit =
          phase1_fit(train, def.p_tilde, spec.penalty, 0.0, spec.cv,
                     spec.solver, true, spec.grid_size);
      return forecast_h(fit, train, 1).row(0);
    }
  }
  const TwoPhaseFit fit = two_phase_fit(train, cfg);
  return forecast_h(fit, train, 1).row(0);
}

}  // namespace

StudyResult run_study(const StudySpec& spec) {
  if (spec.N < 2) throw std::invalid_argument("run_study: need N >= 2");
  if (spec.estimators.empty())
    throw std::invalid_argument("run_study: no estimators requested");
  const int E = static_cast<int>(spec.estimators.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  StudyResult out;
  out.spec = spec;
  const std::vector<double> levels = sweep_levels(spec.sweep, spec.base);

  for (std::size_t ci = 0; ci < levels.size(); ++ci) {
    const DgpSpec dgp = cell_dgp(spec, levels[ci]);
    const VarmaModel model = build_dgp(dgp);

    StudyCell cell;
    cell.factor = sweep_name(spec.sweep);
    cell.level = levels[ci];
    for (EstimatorKind k : spec.estimators)
      cell.names.push_back(estimator_name(k));
    cell.errors = Eigen::MatrixXd::Constant(spec.N, E, nan);
    cell.failures.assign(E, 0);

    const std::uint64_t cell_seed = derive_seed(spec.master_seed, ci);

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < spec.N; ++r) {
      const std::uint64_t seed = derive_seed(cell_seed, r);
      bool have_sim = false;
      SimulatedPath sim;
      try {
        sim = simulate_path(model, spec.T + 1, spec.burn_in, seed);
        have_sim = true;
      } catch (...) {
      }
      for (int e = 0; e < E; ++e) {
        if (!have_sim) {
#pragma omp atomic
          ++cell.failures[e];
          continue;
        }
        try {
          const Eigen::RowVectorXd fc =
              estimator_forecast(spec.estimators[e], spec, dgp, sim);
          const Eigen::RowVectorXd target =
              sim.observations.values.row(spec.T);
          cell.errors(r, e) = (target - fc).squaredNorm() / dgp.d;
        } catch (...) {
#pragma omp atomic
          ++cell.failures[e];
        }
      }
    }

    for (int e = 0; e < E; ++e)
      if (10 * cell.failures[e] > spec.N)
        throw std::runtime_error("run_study: estimator " + cell.names[e] +
                                 " failed " +
                                 std::to_string(cell.failures[e]) + " of " +
                                 std::to_string(spec.N) +
                                 " replications at level " +
                                 std::to_string(levels[ci]));

    // reference column for the paired tests, if requested
    int ref = -1;
    for (int e = 0; e < E; ++e)
      if (spec.estimators[e] == EstimatorKind::var_reference) ref = e;

    cell.msfe.assign(E, nan);
    cell.paired_stat.assign(E, nan);
    cell.paired_p.assign(E, nan);
    for (int e = 0; e < E; ++e) {
      double sum = 0.0;
      int n = 0;
      for (int r = 0; r < spec.N; ++r)
        if (std::isfinite(cell.errors(r, e))) {
          sum += cell.errors(r, e);
          ++n;
        }
      if (n > 0) cell.msfe[e] = sum / n;
      if (ref >= 0) {
        std::vector<double> a, b;
        for (int r = 0; r < spec.N; ++r)
          if (std::isfinite(cell.errors(r, e)) &&
              std::isfinite(cell.errors(r, ref))) {
            a.push_back(cell.errors(r, e));
            b.push_back(cell.errors(r, ref));
          }
        if (a.size() >= 2) {
          const TTestResult t = paired_ttest(a, b);
          cell.paired_stat[e] = t.statistic;
          cell.paired_p[e] = t.p_value;
        }
      }
    }
    out.cells.push_back(std::move(cell));
  }
  return out;
}

}  // namespace varma
