#include "varma/pipeline.hpp"

#include <cmath>

#include "varma/forecast.hpp"
#include "varma/penalty.hpp"

namespace varma {

Scaling compute_scaling(const Eigen::MatrixXd& values, bool standardize) {
  const long T = values.rows(), d = values.cols();
  Scaling s;
  s.standardized = standardize;
  s.mean = Eigen::VectorXd::Zero(d);
  s.sd = Eigen::VectorXd::Ones(d);
  if (!standardize) return s;
  s.mean = values.colwise().mean();
  if (T < 2) {
    s.degenerate = true;
    return s;
  }
  for (long j = 0; j < d; ++j) {
    const double var =
        (values.col(j).array() - s.mean(j)).square().sum() / (T - 1);
    const double sd = std::sqrt(var);
    if (sd < 1e-150) {
      s.sd(j) = 1.0;  // constant series: leave it alone but flag it
      s.degenerate = true;
    } else {
      s.sd(j) = sd;
    }
  }
  return s;
}

Eigen::MatrixXd apply_scaling(const Eigen::MatrixXd& values, const Scaling& s) {
  if (!s.standardized) return values;
  if (values.cols() != s.mean.size() || values.cols() != s.sd.size())
    throw std::invalid_argument("scaling: dimension mismatch");
  Eigen::MatrixXd out = values.rowwise() - s.mean.transpose();
  out.array().rowwise() /= s.sd.transpose().array();
  return out;
}

Eigen::MatrixXd invert_scaling(const Eigen::MatrixXd& values, const Scaling& s) {
  if (!s.standardized) return values;
  if (values.cols() != s.mean.size() || values.cols() != s.sd.size())
    throw std::invalid_argument("scaling: dimension mismatch");
  Eigen::MatrixXd out = values;
  out.array().rowwise() *= s.sd.transpose().array();
  return out.rowwise() + s.mean.transpose();
}

Orders default_orders(int T) {
  if (T < 4)
    throw std::invalid_argument("default_orders: need T >= 4 to fit any lag");
  const double rt = std::sqrt(static_cast<double>(T));
  Orders o;
  o.p_tilde = std::min(static_cast<int>(std::floor(1.5 * rt)), T / 2);
  o.p = o.q = std::max(1, static_cast<int>(std::floor(0.75 * rt)));
  return o;
}

namespace {

// Y (d x n) and stacked-lag Z (dp x n) for responses at t = p .. T-1.
void var_design(const Eigen::MatrixXd& sv, int p, Eigen::MatrixXd& Y,
                Eigen::MatrixXd& Z) {
  const int T = static_cast<int>(sv.rows());
  const int d = static_cast<int>(sv.cols());
  const int n = T - p;
  Y.resize(d, n);
  Z.resize(d * p, n);
  for (int c = 0; c < n; ++c) {
    const int t = p + c;
    Y.col(c) = sv.row(t).transpose();
    for (int l = 1; l <= p; ++l)
      Z.block((l - 1) * d, c, d, 1) = sv.row(t - l).transpose();
  }
}

struct P2Design {
  Eigen::MatrixXd Y,  // response (possibly the first phase's fitted values)
      Yobs,           // actual observations at the same times
      Z, X;
  int first_t = 0;
};

P2Design phase2_design(const Eigen::MatrixXd& sv, const Eigen::MatrixXd& innov,
                       int innov_start, int p, int q, bool fitted_response) {
  const int T = static_cast<int>(sv.rows());
  const int d = static_cast<int>(sv.cols());
  P2Design ds;
  ds.first_t = (q == 0 && !fitted_response) ? p
                                            : innov_start + std::max(p, q);
  const int n = T - ds.first_t;
  if (n < 3)
    throw std::invalid_argument(
        "phase2: sample too short for the requested orders");
  const bool needs_innov = q > 0 || fitted_response;
  if (needs_innov && innov_start + innov.rows() < T)
    throw std::invalid_argument("phase2: innovation series too short");
  if (needs_innov && innov.cols() != d)
    throw std::invalid_argument("phase2: innovation dimension mismatch");

  ds.Y.resize(d, n);
  ds.Yobs.resize(d, n);
  ds.Z.resize(d * p, n);
  ds.X.resize(d * q, n);
  for (int c = 0; c < n; ++c) {
    const int t = ds.first_t + c;
    ds.Yobs.col(c) = sv.row(t).transpose();
    if (fitted_response)
      ds.Y.col(c) = (sv.row(t) - innov.row(t - innov_start)).transpose();
    else
      ds.Y.col(c) = sv.row(t).transpose();
    for (int l = 1; l <= p; ++l)
      ds.Z.block((l - 1) * d, c, d, 1) = sv.row(t - l).transpose();
    for (int m = 1; m <= q; ++m)
      ds.X.block((m - 1) * d, c, d, 1) =
          innov.row(t - m - innov_start).transpose();
  }
  return ds;
}

bool has_constant_row(const Eigen::MatrixXd& M) {
  for (long r = 0; r < M.rows(); ++r)
    if (M.row(r).maxCoeff() - M.row(r).minCoeff() == 0.0) return true;
  return false;
}

Phase1Result phase1_core(const Eigen::MatrixXd& sv, int p_tilde,
                         PenaltyKind kind, double alpha, const CvOptions& cv,
                         const SolverOptions& solver, int grid_size) {
  const int T = static_cast<int>(sv.rows());
  const int d = static_cast<int>(sv.cols());
  if (p_tilde < 1) throw std::invalid_argument("phase1: p_tilde must be >= 1");
  if (T - p_tilde < 3)
    throw std::invalid_argument("phase1: sample too short for order " +
                                std::to_string(p_tilde));

  Eigen::MatrixXd Y, Z;
  var_design(sv, p_tilde, Y, Z);
  const double lmax = lambda_max(Y, Z);
  if (!(lmax > 0))
    throw std::domain_error("phase1: zero gradient at the origin, no grid");

  const LambdaGrid grid = make_grid(lmax, grid_size);
  const int G = static_cast<int>(grid.values.size());
  std::vector<CvGridPoint> points(G);
  for (int g = 0; g < G; ++g) points[g] = {grid.values[g], 0.0};

  const Eigen::MatrixXd no_theta(d, 0);
  const Eigen::MatrixXd no_innov(0, d);

  auto forecaster = [&](int t) -> Eigen::MatrixXd {
    const int cols = t - p_tilde;
    if (cols < 2)
      throw std::invalid_argument("phase1: training window too small");
    const Eigen::MatrixXd Yt = Y.leftCols(cols);
    const Eigen::MatrixXd Zt = Z.leftCols(cols);
    const Eigen::MatrixXd Xt(0, cols);
    const double step = spectral_step(Zt, Xt);
    Eigen::MatrixXd init = Eigen::MatrixXd::Zero(d, Z.rows());
    const Eigen::MatrixXd hist = sv.topRows(t);
    Eigen::MatrixXd out(G, d);
    for (int g = 0; g < G; ++g) {
      const PenaltySpec spec{kind, grid.values[g], 0.0, alpha};
      auto fit = solve_all_rows(Yt, Zt, Xt, spec, solver, init, no_theta, step);
      init = fit.phi;
      const Eigen::MatrixXd fc =
          forecast_recursive(fit.phi, Eigen::MatrixXd(d, 0), hist, no_innov,
                             cv.h);
      out.row(g) = fc.row(cv.h - 1);
    }
    return out;
  };

  Phase1Result res;
  res.cv = cv_select(PanelData{sv, {}}, forecaster, points, cv.h, cv.S, cv.rule);

  const Eigen::MatrixXd Xfull(0, Y.cols());
  const double step = spectral_step(Z, Xfull);
  Eigen::MatrixXd init = Eigen::MatrixXd::Zero(d, Z.rows());
  for (int g = 0; g <= res.cv.chosen; ++g) {
    const PenaltySpec spec{kind, grid.values[g], 0.0, alpha};
    auto fit = solve_all_rows(Y, Z, Xfull, spec, solver, init, no_theta, step);
    init = fit.phi;
    if (g == res.cv.chosen) {
      res.pi_hat = fit.phi;
      res.diagnostics = fit.rows;
    }
  }
  res.p_tilde = p_tilde;
  res.lambda = grid.values[res.cv.chosen];
  res.residuals = (Y - res.pi_hat * Z).transpose();
  res.residual_start = p_tilde;
  res.degenerate_regressors = has_constant_row(Z);
  return res;
}

Phase2Result phase2_core(const Eigen::MatrixXd& sv, const Eigen::MatrixXd& innov,
                         int innov_start, int p, int q, PenaltyKind kind,
                         double alpha, const CvOptions& cv,
                         const SolverOptions& solver, int grid_size,
                         bool fitted_response) {
  const int d = static_cast<int>(sv.cols());
  if (p < 0 || q < 0 || p + q == 0)
    throw std::invalid_argument("phase2: need p + q >= 1");

  const P2Design ds =
      phase2_design(sv, innov, innov_start, p, q, fitted_response);

  std::vector<double> gphi{0.0}, gtheta{0.0};
  if (p > 0) {
    const double lm = lambda_max(ds.Y, ds.Z);
    if (!(lm > 0))
      throw std::domain_error("phase2: zero AR gradient at the origin");
    gphi = make_grid(lm, grid_size).values;
  }
  if (q > 0) {
    const double lm = lambda_max(ds.Y, ds.X);
    if (!(lm > 0))
      throw std::domain_error("phase2: zero MA gradient at the origin");
    gtheta = make_grid(lm, grid_size).values;
  }

  // Cartesian scan, both weights descending; warm starts follow scan order.
  std::vector<double> lphi, ltheta;
  std::vector<CvGridPoint> points;
  for (double a : gphi)
    for (double b : gtheta) {
      lphi.push_back(a);
      ltheta.push_back(b);
      points.push_back({a + b, b});
    }
  const int G = static_cast<int>(points.size());

  auto forecaster = [&](int t) -> Eigen::MatrixXd {
    const int cols = t - ds.first_t;
    if (cols < 2)
      throw std::invalid_argument("phase2: training window too small");
    const Eigen::MatrixXd Yt = ds.Y.leftCols(cols);
    const Eigen::MatrixXd Zt = ds.Z.leftCols(cols);
    const Eigen::MatrixXd Xt = ds.X.leftCols(cols);
    const double step = spectral_step(Zt, Xt);
    Eigen::MatrixXd init_phi = Eigen::MatrixXd::Zero(d, ds.Z.rows());
    Eigen::MatrixXd init_theta = Eigen::MatrixXd::Zero(d, ds.X.rows());
    const Eigen::MatrixXd hist = sv.topRows(t);
    const Eigen::MatrixXd innov_tail =
        q > 0 ? Eigen::MatrixXd(innov.topRows(t - innov_start))
              : Eigen::MatrixXd(0, d);
    Eigen::MatrixXd out(G, d);
    for (int g = 0; g < G; ++g) {
      const PenaltySpec spec{kind, lphi[g], ltheta[g], alpha};
      auto fit =
          solve_all_rows(Yt, Zt, Xt, spec, solver, init_phi, init_theta, step);
      init_phi = fit.phi;
      init_theta = fit.theta;
      const Eigen::MatrixXd fc =
          forecast_recursive(fit.phi, fit.theta, hist, innov_tail, cv.h);
      out.row(g) = fc.row(cv.h - 1);
    }
    return out;
  };

  Phase2Result res;
  res.cv = cv_select(PanelData{sv, {}}, forecaster, points, cv.h, cv.S, cv.rule);

  const double step = spectral_step(ds.Z, ds.X);
  Eigen::MatrixXd init_phi = Eigen::MatrixXd::Zero(d, ds.Z.rows());
  Eigen::MatrixXd init_theta = Eigen::MatrixXd::Zero(d, ds.X.rows());
  for (int g = 0; g <= res.cv.chosen; ++g) {
    const PenaltySpec spec{kind, lphi[g], ltheta[g], alpha};
    auto fit = solve_all_rows(ds.Y, ds.Z, ds.X, spec, solver, init_phi,
                              init_theta, step);
    init_phi = fit.phi;
    init_theta = fit.theta;
    if (g == res.cv.chosen) {
      res.phi_hat = fit.phi;
      res.theta_hat = fit.theta;
      res.diagnostics = fit.rows;
    }
  }
  res.p = p;
  res.q = q;
  res.lambda_phi = lphi[res.cv.chosen];
  res.lambda_theta = ltheta[res.cv.chosen];
  Eigen::MatrixXd fitv = Eigen::MatrixXd::Zero(d, ds.Yobs.cols());
  if (p > 0) fitv.noalias() += res.phi_hat * ds.Z;
  if (q > 0) fitv.noalias() += res.theta_hat * ds.X;
  res.residuals = (ds.Yobs - fitv).transpose();
  res.residual_start = ds.first_t;
  return res;
}

}  // namespace

Phase1Result phase1_fit(const PanelData& data, int p_tilde, PenaltyKind kind,
                        double alpha, const CvOptions& cv,
                        const SolverOptions& solver, bool standardize,
                        int grid_size) {
  data.validate();
  const Scaling scaling = compute_scaling(data.values, standardize);
  const Eigen::MatrixXd sv = apply_scaling(data.values, scaling);
  Phase1Result res =
      phase1_core(sv, p_tilde, kind, alpha, cv, solver, grid_size);
  res.scaling = scaling;
  return res;
}

Phase2Result phase2_fit(const PanelData& data, const Phase1Result& first,
                        int p, int q, PenaltyKind kind, double alpha,
                        const CvOptions& cv, const SolverOptions& solver,
                        int grid_size) {
  data.validate();
  const Eigen::MatrixXd sv = apply_scaling(data.values, first.scaling);
  Phase2Result res =
      phase2_core(sv, first.residuals, first.residual_start, p, q, kind,
                  alpha, cv, solver, grid_size, false);
  res.scaling = first.scaling;
  return res;
}

TwoPhaseFit two_phase_fit(const PanelData& data, const FitConfig& config) {
  data.validate();
  const int T = static_cast<int>(data.T());
  const int d = static_cast<int>(data.dim());
  const Orders orders = config.orders ? *config.orders : default_orders(T);
  if (orders.p < 0 || orders.q < 0 || orders.p + orders.q == 0)
    throw std::invalid_argument("two_phase_fit: need p + q >= 1");

  const Scaling scaling = compute_scaling(data.values, config.standardize);
  const Eigen::MatrixXd sv = apply_scaling(data.values, scaling);

  TwoPhaseFit out;
  out.penalty = config.penalty;
  out.orders = orders;

  Eigen::MatrixXd innov(0, d);
  int innov_start = 0;
  if (config.innovations) {
    if (config.innovations->rows() != T || config.innovations->cols() != d)
      throw std::invalid_argument("two_phase_fit: innovations must be T x d");
    if (!config.innovations->allFinite())
      throw std::invalid_argument("two_phase_fit: non-finite innovations");
    // innovations scale with the series but are not centered
    innov = *config.innovations;
    if (scaling.standardized)
      innov.array().rowwise() /= scaling.sd.transpose().array();
  } else if (orders.q > 0 || config.fitted_response) {
    Phase1Result p1 = phase1_core(sv, orders.p_tilde, config.penalty,
                                  config.alpha, config.cv, config.solver,
                                  config.grid_size);
    p1.scaling = scaling;
    innov = p1.residuals;
    innov_start = p1.residual_start;
    out.phase1 = std::move(p1);
  }

  out.phase2 = phase2_core(sv, innov, innov_start, orders.p, orders.q,
                           config.penalty, config.alpha, config.cv,
                           config.solver, config.grid_size,
                           config.fitted_response);
  out.phase2.scaling = scaling;
  out.innovations = std::move(innov);
  out.innovations_start = innov_start;
  return out;
}

}  // namespace varma
