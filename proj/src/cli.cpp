#include "varma/cli.hpp"

#include <omp.h>

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "varma/forecast.hpp"
#include "varma/io.hpp"

namespace varma::cli {

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_readable(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw usage_error(path + ": cannot open for reading");
}

PenaltyKind penalty_from_flag(const std::string& s) {
  if (s == "l1") return PenaltyKind::l1;
  if (s == "hlag") return PenaltyKind::hlag;
  throw usage_error("unknown penalty '" + s + "' (expected l1 or hlag)");
}

/// Shared order/penalty/cv flags of the fitting subcommands.
struct FitFlags {
  std::string penalty = "hlag";
  int p_tilde = -1, p = -1, q = -1;
  int grid = 10;
  double alpha = 0.0;
  bool no_standardize = false;
  bool fitted_response = false;
  int h = 1;
  int S = -1;
  std::string cv_rule = "one-se";

  void attach(CLI::App* cmd) {
    cmd->set_help_flag("--help", "Print help");  // frees -h for --h
    cmd->add_option("--penalty", penalty, "Penalty family: l1 or hlag")
        ->check(CLI::IsMember({"l1", "hlag"}));
    cmd->add_option("--p-tilde", p_tilde,
                    "First-phase autoregression order (default: from T)");
    cmd->add_option("--p", p, "AR order (default: from T)");
    cmd->add_option("--q", q, "MA order (default: from T)");
    cmd->add_option("--grid", grid, "Penalty grid size per side");
    cmd->add_option("--alpha", alpha, "Ridge perturbation weight");
    cmd->add_flag("--no-standardize", no_standardize,
                  "Fit on the original scale");
    cmd->add_flag("--fitted-response", fitted_response,
                  "Regress on first-phase fitted values instead of data");
    cmd->add_option("--h", h, "Selection forecast horizon");
    cmd->add_option("--S", S,
                    "First selection origin (default: floor(0.9 T))");
    cmd->add_option("--cv-rule", cv_rule,
                    "Penalty pick: one-se (most regularized within one SE) "
                    "or min")
        ->check(CLI::IsMember({"one-se", "min"}));
  }

  FitConfig config(int T) const {
    FitConfig cfg;
    cfg.penalty = penalty_from_flag(penalty);
    if (p_tilde >= 0 || p >= 0 || q >= 0) {
      Orders o = default_orders(T);
      if (p_tilde >= 0) o.p_tilde = p_tilde;
      if (p >= 0) o.p = p;
      if (q >= 0) o.q = q;
      cfg.orders = o;
    }
    cfg.grid_size = grid;
    cfg.alpha = alpha;
    cfg.standardize = !no_standardize;
    cfg.fitted_response = fitted_response;
    cfg.cv.h = h;
    cfg.cv.S = S;
    cfg.cv.rule = cv_rule == "min" ? CvRule::min : CvRule::one_se;
    return cfg;
  }
};

void print_lag_report(const TwoPhaseFit& fit,
                      const std::vector<std::string>& names) {
  const LagMatrixReport rep =
      lag_report(fit.phase2.phi_hat, fit.phase2.p, fit.phase2.theta_hat,
                 fit.phase2.q);
  if (rep.ar_lags.size()) {
    std::cout << "AR lag structure (max selected lag per equation x series):\n"
              << render_lag_matrix(rep.ar_lags, names);
    std::cout << (rep.ar_lags.array() == 0).count() << " of "
              << rep.ar_lags.size() << " AR entries are zero\n";
  }
  if (rep.ma_lags.size()) {
    std::cout << "MA lag structure:\n" << render_lag_matrix(rep.ma_lags, names);
    std::cout << (rep.ma_lags.array() == 0).count() << " of "
              << rep.ma_lags.size() << " MA entries are zero\n";
  }
  std::cout << "nonzero coefficients: " << rep.nonzero_count << " of "
            << rep.total_params << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Sparse identification, estimation and forecasting of "
               "large VARMA models"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "OpenMP thread count (default: all cores)");

  // ---- simulate ----
  auto* c_sim = app.add_subcommand(
      "simulate", "Draw a sample path from a built-in generator");
  std::string sim_dgp = "banded", sim_out;
  DgpSpec sim_spec;
  int sim_T = 0, sim_burn = 200;
  std::uint64_t sim_seed = 1;
  c_sim->add_option("--dgp", sim_dgp,
                    "toy-dense | toy-sparse (2-variable pair) | banded "
                    "(diagonal AR, banded MA)")
      ->check(CLI::IsMember({"toy-dense", "toy-sparse", "banded"}));
  c_sim->add_option("--d", sim_spec.d, "Series count (banded)");
  c_sim->add_option("--p", sim_spec.p, "AR order (banded)");
  c_sim->add_option("--q", sim_spec.q, "MA order (banded)");
  c_sim->add_option("--theta", sim_spec.theta, "MA scale (banded)");
  c_sim->add_option("--T", sim_T, "Sample length")->required();
  c_sim->add_option("--burn-in", sim_burn, "Discarded leading steps");
  c_sim->add_option("--seed", sim_seed, "RNG seed");
  c_sim->add_option("-o,--output", sim_out, "Output CSV path")->required();

  // ---- fit ----
  auto* c_fit = app.add_subcommand(
      "fit", "Two-phase penalized VARMA fit with rolling-origin selection");
  std::string fit_in, fit_out;
  FitFlags fit_flags;
  c_fit->add_option("-i,--input", fit_in, "Input CSV")->required();
  fit_flags.attach(c_fit);
  c_fit->add_option("-o,--output", fit_out, "Output fit JSON")->required();

  // ---- identify ----
  auto* c_id = app.add_subcommand(
      "identify", "Penalty-minimal representation of a VAR filter");
  std::string id_in, id_out, id_penalty = "l1", id_alpha = "limit";
  int id_p = 0, id_q = 0;
  c_id->add_option("-i,--input", id_in,
                   "Filter JSON: list of lag matrices, or {\"pi\": [...]}")
      ->required();
  c_id->add_option("--p", id_p, "AR order")->required();
  c_id->add_option("--q", id_q, "MA order")->required();
  c_id->add_option("--penalty", id_penalty, "l1 or hlag")
      ->check(CLI::IsMember({"l1", "hlag"}));
  c_id->add_option("--alpha", id_alpha, "Ridge weight, or 'limit'");
  c_id->add_option("-o,--output", id_out, "Output target JSON")->required();

  // ---- forecast ----
  auto* c_fc = app.add_subcommand("forecast", "h-step forecast from a fit");
  c_fc->set_help_flag("--help", "Print help");
  std::string fc_fit, fc_in, fc_out;
  int fc_h = 1;
  c_fc->add_option("--fit", fc_fit, "Fit JSON from `fit`")->required();
  c_fc->add_option("-i,--input", fc_in, "History CSV (the fitted sample)")
      ->required();
  c_fc->add_option("--h", fc_h, "Forecast horizon");
  c_fc->add_option("-o,--output", fc_out, "Output CSV")->required();

  // ---- cv ----
  auto* c_cv = app.add_subcommand(
      "cv", "Report the rolling-origin selection curves of a fit");
  std::string cv_in, cv_out;
  FitFlags cv_flags;
  c_cv->add_option("-i,--input", cv_in, "Input CSV")->required();
  cv_flags.attach(c_cv);
  c_cv->add_option("-o,--output", cv_out, "Output JSON")->required();

  // ---- eval ----
  auto* c_ev = app.add_subcommand(
      "eval", "Expanding-window forecast comparison on a data set");
  std::string ev_in, ev_out;
  FitFlags ev_flags;
  std::vector<int> ev_horizons{1};
  std::vector<std::string> ev_estimators{"varma", "var"};
  int ev_S = -1;
  c_ev->add_option("-i,--input", ev_in, "Input CSV")->required();
  ev_flags.attach(c_ev);
  c_ev->add_option("--horizons", ev_horizons, "Comma-separated horizons")
      ->delimiter(',');
  c_ev->add_option("--estimators", ev_estimators,
                   "Subset of {varma, var}")
      ->delimiter(',');
  c_ev->add_option("--eval-start", ev_S,
                   "First evaluation origin (default: floor(0.75 T))");
  c_ev->add_option("-o,--output", ev_out, "Output CSV (+ .json archive)")
      ->required();

  // ---- study ----
  auto* c_st = app.add_subcommand(
      "study", "Simulation study over a factor sweep");
  StudySpec st_spec;
  std::string st_sweep = "theta", st_penalty = "hlag", st_out;
  c_st->add_option("--sweep", st_sweep, "theta | q | d | none")
      ->check(CLI::IsMember({"theta", "q", "d", "none"}));
  c_st->add_option("--N", st_spec.N, "Replications per level");
  c_st->add_option("--T", st_spec.T, "Sample length");
  c_st->add_option("--d", st_spec.base.d, "Base series count");
  c_st->add_option("--p", st_spec.base.p, "Base AR order");
  c_st->add_option("--q", st_spec.base.q, "Base MA order");
  c_st->add_option("--theta", st_spec.base.theta, "Base MA scale");
  c_st->add_option("--penalty", st_penalty, "l1 or hlag")
      ->check(CLI::IsMember({"l1", "hlag"}));
  c_st->add_option("--seed", st_spec.master_seed, "Master seed");
  c_st->add_option("--grid", st_spec.grid_size, "Penalty grid size");
  c_st->add_option("-o,--output", st_out, "Results CSV (+ .json archive)")
      ->required();

  // CLI11's vector overload consumes arguments back to front.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*c_sim) {
      VarmaModel model;
      if (sim_dgp == "banded") {
        model = build_dgp(sim_spec);
      } else {
        model = toy_model(sim_dgp == "toy-dense");
        sim_spec.d = 2;
        sim_spec.p = sim_spec.q = 1;
        sim_spec.theta = 0.0;
      }
      const SimulatedPath path =
          simulate_path(model, sim_T, sim_burn, sim_seed);
      io::write_csv(sim_out, path.observations);
      io::write_json(sim_out + ".json",
                     io::sim_sidecar(sim_dgp, sim_spec, sim_T, sim_burn,
                                     sim_seed));
      std::cout << "wrote " << sim_T << "x" << model.dim() << " sample to "
                << sim_out << " (seed " << sim_seed << ")\n";
    } else if (*c_fit) {
      require_readable(fit_in);
      const PanelData data = io::read_csv(fit_in);
      const FitConfig cfg = fit_flags.config(static_cast<int>(data.T()));
      const TwoPhaseFit fit = two_phase_fit(data, cfg);
      io::write_json(fit_out, io::fit_to_json(fit));
      std::cout << "orders: p_tilde=" << fit.orders.p_tilde
                << " p=" << fit.orders.p << " q=" << fit.orders.q
                << "  selected weights: lambda_phi="
                << fit.phase2.lambda_phi
                << " lambda_theta=" << fit.phase2.lambda_theta << "\n";
      print_lag_report(fit, data.names);
      std::cout << "wrote " << fit_out << "\n";
    } else if (*c_id) {
      require_readable(id_in);
      const nlohmann::json j = io::read_json(id_in);
      const nlohmann::json& mats = j.is_array() ? j : j.at("pi");
      std::vector<Eigen::MatrixXd> coeffs;
      for (const auto& m : mats)
        coeffs.push_back(io::matrix_from_json(m, "pi"));
      if (coeffs.empty()) throw usage_error("identify: empty filter");
      const int id_d = static_cast<int>(coeffs[0].rows());
      IdentProblem problem;
      problem.pi = LagPolynomial::ar(id_d, std::move(coeffs));
      problem.p = id_p;
      problem.q = id_q;
      problem.penalty = penalty_from_flag(id_penalty);
      IdentTarget target;
      if (id_alpha == "limit") {
        target = limit_target(problem);
      } else {
        problem.alpha = std::stod(id_alpha);
        target = solve_target(problem);
      }
      io::write_json(id_out, io::target_to_json(target));
      std::cout << "objective " << target.objective
                << ", constraint violation " << target.constraint_violation
                << ", wrote " << id_out << "\n";
    } else if (*c_fc) {
      require_readable(fc_fit);
      require_readable(fc_in);
      const TwoPhaseFit fit = io::fit_from_json(io::read_json(fc_fit));
      const PanelData data = io::read_csv(fc_in);
      const Eigen::MatrixXd fc = forecast_h(fit, data, fc_h);
      io::write_csv(fc_out, PanelData{fc, data.names});
      std::cout << "wrote " << fc_h << "x" << fc.cols() << " forecast to "
                << fc_out << "\n";
    } else if (*c_cv) {
      require_readable(cv_in);
      const PanelData data = io::read_csv(cv_in);
      const FitConfig cfg = cv_flags.config(static_cast<int>(data.T()));
      const TwoPhaseFit fit = two_phase_fit(data, cfg);
      nlohmann::json j;
      j["schema"] = "varma-cv/1";
      j["phase1"] =
          fit.phase1 ? io::cv_to_json(fit.phase1->cv) : nlohmann::json();
      j["phase2"] = io::cv_to_json(fit.phase2.cv);
      io::write_json(cv_out, j);
      std::cout << "phase-2 grid: " << fit.phase2.cv.points.size()
                << " points, chosen index " << fit.phase2.cv.chosen
                << ", wrote " << cv_out << "\n";
    } else if (*c_ev) {
      require_readable(ev_in);
      const PanelData data = io::read_csv(ev_in);
      std::vector<EvalEstimator> ests;
      for (const std::string& name : ev_estimators) {
        if (name == "varma") {
          ests.push_back(
              {"varma", [&ev_flags](const PanelData& train, int max_h) {
                 FitConfig cfg =
                     ev_flags.config(static_cast<int>(train.T()));
                 const TwoPhaseFit f = two_phase_fit(train, cfg);
                 return forecast_h(f, train, max_h);
               }});
        } else if (name == "var") {
          ests.push_back(
              {"var", [&ev_flags](const PanelData& train, int max_h) {
                 const int T = static_cast<int>(train.T());
                 const int pt = ev_flags.p_tilde >= 0
                                    ? ev_flags.p_tilde
                                    : default_orders(T).p_tilde;
                 const Phase1Result f = phase1_fit(
                     train, pt, penalty_from_flag(ev_flags.penalty),
                     ev_flags.alpha, CvOptions{ev_flags.h, ev_flags.S},
                     SolverOptions{}, !ev_flags.no_standardize,
                     ev_flags.grid);
                 return forecast_h(f, train, max_h);
               }});
        } else {
          throw usage_error("unknown estimator '" + name +
                            "' (expected varma or var)");
        }
      }
      const EvalResult result =
          expanding_window_eval(data, ests, ev_horizons, ev_S);
      io::write_text(ev_out, io::eval_to_csv(result));
      io::write_json(ev_out + ".json", io::eval_to_json(result));
      std::cout << io::eval_to_csv(result) << "wrote " << ev_out << "\n";
    } else if (*c_st) {
      st_spec.sweep = st_sweep == "theta"  ? SweepKind::theta
                      : st_sweep == "q"    ? SweepKind::q
                      : st_sweep == "d"    ? SweepKind::d
                                           : SweepKind::none;
      st_spec.penalty = penalty_from_flag(st_penalty);
      const StudyResult result = run_study(st_spec);
      io::write_text(st_out, io::study_to_csv(result));
      io::write_json(st_out + ".json", io::study_to_json(result));
      std::cout << io::study_to_csv(result) << "(master seed "
                << st_spec.master_seed << ") wrote " << st_out << "\n";
    }
    return 0;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace varma::cli
