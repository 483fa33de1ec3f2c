#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "varma/evaluate.hpp"
#include "varma/experiments.hpp"
#include "varma/identify.hpp"
#include "varma/pipeline.hpp"

namespace varma::io {

/// CSV convention: rows = time ascending, mandatory header row with series
/// names, comma separator, '.' decimal, UTF-8, no missing values.  Parse
/// errors carry "path:line:" prefixes.  Writers are atomic (temp + rename)
/// and print doubles with shortest round-trip precision.
PanelData read_csv(const std::string& path);
void write_csv(const std::string& path, const PanelData& data);

/// Atomic small-file text write (temp in the same directory + rename).
void write_text(const std::string& path, const std::string& content);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* what);

/// Fit archive, schema "varma-fit/1": orders, penalty, scaling, both
/// phases' coefficients and residuals, and the innovation series used for
/// the MA regressors - everything forecast_h needs.
nlohmann::json fit_to_json(const TwoPhaseFit& fit);
TwoPhaseFit fit_from_json(const nlohmann::json& j);

nlohmann::json cv_to_json(const CvReport& report);
CvReport cv_from_json(const nlohmann::json& j);

/// Identification-target archive, schema "varma-identify/1".
nlohmann::json target_to_json(const IdentTarget& target);

/// Simulation sidecar, schema "varma-sim/1": generator parameters, seed and
/// the pinned draw algorithm, so a run is reproducible from the sidecar.
nlohmann::json sim_sidecar(const std::string& dgp, const DgpSpec& spec, int T,
                           int burn_in, std::uint64_t seed);

/// Study archive (full per-replication errors) and results-table CSV
/// (per estimator: mean squared forecast error and paired-t p-value against
/// the reference, one column pair per factor level).
nlohmann::json study_to_json(const StudyResult& result);
std::string study_to_csv(const StudyResult& result);

/// Expanding-window evaluation: estimator x horizon table as CSV, full
/// per-origin losses as JSON.
nlohmann::json eval_to_json(const EvalResult& result);
std::string eval_to_csv(const EvalResult& result);

}  // namespace varma::io
