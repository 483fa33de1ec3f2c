#include "varma/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace varma {

double msfe(const Eigen::MatrixXd& actual, const Eigen::MatrixXd& forecast) {
  if (actual.rows() != forecast.rows() || actual.cols() != forecast.cols())
    throw std::invalid_argument("msfe: shape mismatch");
  if (actual.rows() == 0) throw std::invalid_argument("msfe: empty input");
  const double d = static_cast<double>(actual.cols());
  return (actual - forecast).rowwise().squaredNorm().mean() / d;
}

CvReport cv_select(const PanelData& data, const GridForecaster& forecaster,
                   const std::vector<CvGridPoint>& points, int h, int S,
                   CvRule rule) {
  data.validate();
  if (h < 1) throw std::invalid_argument("cv_select: h must be >= 1");
  if (points.empty()) throw std::invalid_argument("cv_select: empty grid");
  const int T = static_cast<int>(data.T());
  const int d = static_cast<int>(data.dim());
  if (S < 0) S = (9 * T) / 10;
  const int n_origins = T - h - S + 1;
  if (n_origins < 2)
    throw std::invalid_argument("cv_select: fewer than 2 evaluation points");

  const int G = static_cast<int>(points.size());
  // loss(o, g): squared error / d of grid point g at origin index o
  Eigen::MatrixXd loss(n_origins, G);
  std::vector<std::string> origin_errors(n_origins);

#pragma omp parallel for schedule(dynamic)
  for (int o = 0; o < n_origins; ++o) {
    try {
      const int t = S + o;
      Eigen::MatrixXd fc = forecaster(t);
      if (fc.rows() != G || fc.cols() != d)
        throw std::invalid_argument("cv_select: forecaster returned bad shape");
      const Eigen::RowVectorXd target = data.values.row(t + h - 1);
      for (int g = 0; g < G; ++g)
        loss(o, g) = (fc.row(g) - target).squaredNorm() / d;
    } catch (const std::exception& e) {
      origin_errors[o] = e.what();
    }
  }
  for (int o = 0; o < n_origins; ++o)
    if (!origin_errors[o].empty())
      throw std::runtime_error("cv_select: origin " + std::to_string(S + o) +
                               " failed: " + origin_errors[o]);

  CvReport rep;
  rep.points = points;
  rep.origins = n_origins;
  rep.first_origin = S;
  rep.msfe.resize(G);
  rep.se.resize(G);
  for (int g = 0; g < G; ++g) {
    const double mean = loss.col(g).mean();
    const double var =
        (loss.col(g).array() - mean).square().sum() / (n_origins - 1);
    rep.msfe[g] = mean;
    rep.se[g] = std::sqrt(var / n_origins);
  }
  rep.min_index = static_cast<int>(
      std::min_element(rep.msfe.begin(), rep.msfe.end()) - rep.msfe.begin());
  rep.rule = rule;

  if (rule == CvRule::min) {
    rep.chosen = rep.min_index;
    return rep;
  }
  const double bar = rep.msfe[rep.min_index] + rep.se[rep.min_index];
  int best = -1;
  for (int g = 0; g < G; ++g) {
    if (rep.msfe[g] > bar) continue;
    if (best < 0 ||
        points[g].lambda_total > points[best].lambda_total ||
        (points[g].lambda_total == points[best].lambda_total &&
         points[g].lambda_theta > points[best].lambda_theta))
      best = g;
  }
  rep.chosen = best;
  return rep;
}

DmResult dm_test(const std::vector<double>& errors_a,
                 const std::vector<double>& errors_b, int h) {
  if (errors_a.size() != errors_b.size())
    throw std::invalid_argument("dm_test: length mismatch");
  const int n = static_cast<int>(errors_a.size());
  if (h < 1) throw std::invalid_argument("dm_test: h must be >= 1");
  if (n < 2) throw std::invalid_argument("dm_test: need at least 2 points");

  std::vector<double> diff(n);
  bool all_zero = true;
  for (int t = 0; t < n; ++t) {
    if (!std::isfinite(errors_a[t]) || !std::isfinite(errors_b[t]))
      throw std::invalid_argument("dm_test: non-finite error");
    diff[t] = errors_a[t] * errors_a[t] - errors_b[t] * errors_b[t];
    all_zero &= diff[t] == 0.0;
  }
  if (all_zero) return {0.0, 1.0};

  double mean = 0.0;
  for (double v : diff) mean += v;
  mean /= n;

  // rectangular-kernel long-run variance with h-1 lags
  double lrv = 0.0;
  for (int j = 0; j < h && j < n; ++j) {
    double gamma = 0.0;
    for (int t = j; t < n; ++t) gamma += (diff[t] - mean) * (diff[t - j] - mean);
    gamma /= n;
    lrv += (j == 0 ? 1.0 : 2.0) * gamma;
  }
  if (lrv <= 0.0)
    throw std::domain_error("dm_test: nonpositive long-run variance, test degenerate");

  const double stat = mean / std::sqrt(lrv / n);
  const double p = std::erfc(std::abs(stat) / std::sqrt(2.0));
  return {stat, p};
}

namespace {

// Regularised incomplete beta by Lentz continued fraction; standard route
// to the Student-t distribution function.
double betacf(double a, double b, double x) {
  const double eps = 3e-14, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double hres = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    hres *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    hres *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return hres;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

TTestResult paired_ttest(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_ttest: length mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 2) throw std::invalid_argument("paired_ttest: need at least 2 pairs");
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= n;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = a[i] - b[i] - mean;
    var += c * c;
  }
  var /= (n - 1);
  if (var == 0.0) {
    if (mean == 0.0) return {0.0, 1.0};
    return {mean > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity(),
            0.0};
  }
  const double t = mean / std::sqrt(var / n);
  const double df = n - 1;
  const double p = ibeta(df / 2.0, 0.5, df / (df + t * t));
  return {t, p};
}

Eigen::MatrixXi lag_matrix(const Eigen::MatrixXd& block, int lags,
                           double zero_tol) {
  if (lags < 0) throw std::invalid_argument("lag_matrix: negative lag count");
  const long d = block.rows();
  if (lags == 0) return Eigen::MatrixXi::Zero(d, d);
  if (block.cols() != d * lags)
    throw std::invalid_argument("lag_matrix: block is not d x (d*lags)");
  Eigen::MatrixXi L = Eigen::MatrixXi::Zero(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j)
      for (int l = lags; l >= 1; --l)
        if (std::abs(block(i, (l - 1) * d + j)) > zero_tol) {
          L(i, j) = l;
          break;
        }
  return L;
}

LagMatrixReport lag_report(const Eigen::MatrixXd& phi_block, int p,
                           const Eigen::MatrixXd& theta_block, int q,
                           double zero_tol) {
  LagMatrixReport rep;
  const long d = p > 0 ? phi_block.rows() : theta_block.rows();
  rep.ar_lags = p > 0 ? lag_matrix(phi_block, p, zero_tol)
                      : Eigen::MatrixXi(0, 0);
  rep.ma_lags = q > 0 ? lag_matrix(theta_block, q, zero_tol)
                      : Eigen::MatrixXi(0, 0);
  rep.total_params = static_cast<int>(d * d) * (p + q);
  rep.nonzero_count =
      static_cast<int>((phi_block.array().abs() > zero_tol).count() +
                       (theta_block.array().abs() > zero_tol).count());
  return rep;
}

std::string render_lag_matrix(const Eigen::MatrixXi& L,
                              const std::vector<std::string>& names) {
  const long d = L.rows();
  std::vector<std::string> labels(d);
  std::size_t label_w = 0;
  for (long i = 0; i < d; ++i) {
    labels[i] = (static_cast<long>(names.size()) == d) ? names[i]
                                                       : "y" + std::to_string(i + 1);
    label_w = std::max(label_w, labels[i].size());
  }
  int cell_w = 1;
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j)
      cell_w = std::max(cell_w, static_cast<int>(std::to_string(L(i, j)).size()));

  std::ostringstream out;
  for (long i = 0; i < d; ++i) {
    out << std::setw(static_cast<int>(label_w)) << labels[i] << " |";
    for (long j = 0; j < d; ++j)
      out << ' ' << std::setw(cell_w) << L(i, j);
    out << '\n';
  }
  return out.str();
}

EvalResult expanding_window_eval(const PanelData& data,
                                 const std::vector<EvalEstimator>& estimators,
                                 const std::vector<int>& horizons, int S) {
  data.validate();
  if (estimators.empty()) throw std::invalid_argument("eval: no estimators");
  if (horizons.empty()) throw std::invalid_argument("eval: no horizons");
  for (int h : horizons)
    if (h < 1) throw std::invalid_argument("eval: horizons must be >= 1");
  const int T = static_cast<int>(data.T());
  const int d = static_cast<int>(data.dim());
  const int max_h = *std::max_element(horizons.begin(), horizons.end());
  if (S < 0) S = (3 * T) / 4;
  const int max_origins = T - 1 - S + 1;  // shortest horizon = 1
  if (S < 1 || T - max_h - S + 1 < 1)
    throw std::invalid_argument("eval: no origins fit the longest horizon");

  const int E = static_cast<int>(estimators.size());
  const int H = static_cast<int>(horizons.size());
  EvalResult res;
  res.horizons = horizons;
  res.first_origin = S;
  res.failures.assign(E, 0);
  res.losses.assign(E, {});
  for (int e = 0; e < E; ++e) {
    res.names.push_back(estimators[e].name);
    res.losses[e].assign(H, {});
    for (int k = 0; k < H; ++k)
      res.losses[e][k].assign(std::max(0, T - horizons[k] - S + 1),
                              std::numeric_limits<double>::quiet_NaN());
  }
  std::vector<std::vector<bool>> failed(E,
                                        std::vector<bool>(max_origins, false));

#pragma omp parallel for schedule(dynamic) collapse(2)
  for (int e = 0; e < E; ++e)
    for (int o = 0; o < max_origins; ++o) {
      const int t = S + o;
      PanelData train{data.values.topRows(t), data.names};
      Eigen::MatrixXd fc;
      try {
        fc = estimators[e].forecast(train, max_h);
      } catch (const std::exception&) {
        failed[e][o] = true;
        continue;
      }
      if (fc.rows() < max_h || fc.cols() != d) {
        failed[e][o] = true;
        continue;
      }
      for (int k = 0; k < H; ++k) {
        const int h = horizons[k];
        if (t + h - 1 >= T) continue;
        const double l =
            (fc.row(h - 1) - data.values.row(t + h - 1)).squaredNorm() / d;
        res.losses[e][k][o] = l;
      }
    }

  for (int e = 0; e < E; ++e)
    for (int o = 0; o < max_origins; ++o)
      if (failed[e][o]) ++res.failures[e];

  res.msfe_table.resize(E, H);
  for (int e = 0; e < E; ++e)
    for (int k = 0; k < H; ++k) {
      double acc = 0.0;
      int cnt = 0;
      for (double l : res.losses[e][k])
        if (std::isfinite(l)) {
          acc += l;
          ++cnt;
        }
      res.msfe_table(e, k) =
          cnt > 0 ? acc / cnt : std::numeric_limits<double>::quiet_NaN();
    }
  return res;
}

}  // namespace varma
