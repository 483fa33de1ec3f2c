#include <cmath>

#include "doctest.h"
#include "varma/experiments.hpp"

using namespace varma;

namespace {

StudySpec tiny_spec() {
  StudySpec spec;
  spec.sweep = SweepKind::none;
  spec.base = DgpSpec{2, 1, 1, 0.4, std::nullopt};
  spec.T = 30;
  spec.N = 4;
  spec.estimators = {EstimatorKind::varma_oracle_errors,
                     EstimatorKind::var_reference};
  spec.penalty = PenaltyKind::l1;
  spec.master_seed = 7;
  spec.grid_size = 4;
  return spec;
}

}  // namespace

TEST_CASE("estimator display names") {
  CHECK(estimator_name(EstimatorKind::varma_oracle_errors) == "VARMA(p,q;a)");
  CHECK(estimator_name(EstimatorKind::varma_oracle_orders) ==
        "VARMA(p,q;eps)");
  CHECK(estimator_name(EstimatorKind::varma_default) ==
        "VARMA(phat,qhat;eps)");
  CHECK(estimator_name(EstimatorKind::var_reference) == "VAR(ptilde)");
}

TEST_CASE("plain study: shapes, aggregates, reference t-tests") {
  StudyResult res = run_study(tiny_spec());
  REQUIRE(res.cells.size() == 1);
  const StudyCell& cell = res.cells[0];
  CHECK(cell.factor == "");
  CHECK(cell.level == 0.0);
  REQUIRE(cell.names.size() == 2);
  CHECK(cell.names[0] == "VARMA(p,q;a)");
  CHECK(cell.names[1] == "VAR(ptilde)");
  REQUIRE(cell.errors.rows() == 4);
  REQUIRE(cell.errors.cols() == 2);
  CHECK(cell.errors.allFinite());
  CHECK(cell.failures == std::vector<int>{0, 0});

  for (int e = 0; e < 2; ++e)
    CHECK(cell.msfe[e] ==
          doctest::Approx(cell.errors.col(e).mean()).epsilon(1e-14));

  // the reference tested against itself is exactly a null result
  CHECK(cell.paired_stat[1] == 0.0);
  CHECK(cell.paired_p[1] == 1.0);
  CHECK(std::isfinite(cell.paired_stat[0]));
  CHECK(cell.paired_p[0] > 0.0);
  CHECK(cell.paired_p[0] <= 1.0);
}

TEST_CASE("studies are deterministic in the master seed") {
  StudySpec spec = tiny_spec();
  StudyResult a = run_study(spec);
  StudyResult b = run_study(spec);
  CHECK(a.cells[0].errors == b.cells[0].errors);

  spec.master_seed = 8;
  StudyResult c = run_study(spec);
  CHECK(a.cells[0].errors != c.cells[0].errors);
}

TEST_CASE("replication draws do not depend on the estimator subset") {
  StudySpec both = tiny_spec();
  StudySpec only_ref = tiny_spec();
  only_ref.estimators = {EstimatorKind::var_reference};

  StudyResult full = run_study(both);
  StudyResult ref = run_study(only_ref);
  CHECK(full.cells[0].errors.col(1) == ref.cells[0].errors.col(0));
}

TEST_CASE("zero MA scale collapses both oracle estimators to the same VAR") {
  StudySpec spec = tiny_spec();
  spec.base.theta = 0.0;
  spec.estimators = {EstimatorKind::varma_oracle_errors,
                     EstimatorKind::varma_oracle_orders};
  StudyResult res = run_study(spec);
  CHECK(res.cells[0].errors.col(0) == res.cells[0].errors.col(1));
}

TEST_CASE("theta sweep walks the documented levels") {
  StudySpec spec = tiny_spec();
  spec.sweep = SweepKind::theta;
  spec.N = 2;
  spec.estimators = {EstimatorKind::var_reference};
  StudyResult res = run_study(spec);
  REQUIRE(res.cells.size() == 4);
  const double want[] = {0.0, 0.4, 0.6, 0.8};
  for (int i = 0; i < 4; ++i) {
    CHECK(res.cells[i].factor == "theta");
    CHECK(res.cells[i].level == want[i]);
    CHECK(res.cells[i].errors.allFinite());
  }
}

TEST_CASE("run_study validation") {
  StudySpec spec = tiny_spec();
  spec.N = 1;
  CHECK_THROWS_AS(run_study(spec), std::invalid_argument);

  spec = tiny_spec();
  spec.estimators.clear();
  CHECK_THROWS_AS(run_study(spec), std::invalid_argument);
}
