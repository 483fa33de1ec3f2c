#include "varma/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace varma {

double penalty_value(PenaltyKind kind, const Eigen::MatrixXd& B, int lag_count) {
  if (lag_count < 0) throw std::invalid_argument("penalty_value: negative lag count");
  if (lag_count == 0) {
    if (B.size() != 0 && B.cols() != 0)
      throw std::invalid_argument("penalty_value: nonempty block with zero lags");
    return 0.0;
  }
  const long d = B.rows();
  if (B.cols() != d * lag_count)
    throw std::invalid_argument("penalty_value: block is not d x (d*lags)");
  if (kind == PenaltyKind::l1) return B.cwiseAbs().sum();

  double acc = 0.0;
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      double tail = 0.0;  // running sum of squares from the deepest lag in
      for (int l = lag_count; l >= 1; --l) {
        const double v = B(i, (l - 1) * d + j);
        tail += v * v;
        acc += std::sqrt(tail);
      }
    }
  return acc;
}

namespace {

inline double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

void prox_inplace(PenaltyKind kind, Eigen::Ref<Eigen::RowVectorXd> v, double t,
                  int series, int lags) {
  if (t < 0) throw std::invalid_argument("prox: threshold must be >= 0");
  if (v.size() != static_cast<long>(series) * lags)
    throw std::invalid_argument("prox: vector length != series*lags");
  if (v.size() == 0) return;

  if (kind == PenaltyKind::l1) {
    for (long i = 0; i < v.size(); ++i) v(i) = soft(v(i), t);
    return;
  }

  // Nested suffix groups per series profile: shrinking the deepest group
  // first makes the composition of group thresholds the exact proximal map.
  for (int j = 0; j < series; ++j) {
    double tail2 = 0.0;  // squared norm of the already-shrunk suffix below l
    for (int l = lags; l >= 1; --l) {
      const double head = v((l - 1) * series + j);
      tail2 += head * head;
      const double norm = std::sqrt(tail2);
      if (norm <= t) {
        for (int ll = l; ll <= lags; ++ll) v((ll - 1) * series + j) = 0.0;
        tail2 = 0.0;
      } else {
        const double scale = 1.0 - t / norm;
        for (int ll = l; ll <= lags; ++ll) v((ll - 1) * series + j) *= scale;
        tail2 *= scale * scale;
      }
    }
  }
}

void elastic_shrink_inplace(Eigen::Ref<Eigen::RowVectorXd> v, double alpha,
                            double lambda) {
  if (alpha < 0 || lambda < 0)
    throw std::invalid_argument("elastic_shrink: weights must be >= 0");
  if (alpha == 0.0) return;
  v /= 1.0 + alpha * lambda;
}

double lambda_max(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X) {
  if (Y.size() == 0 || X.size() == 0)
    throw std::invalid_argument("lambda_max: empty input");
  if (Y.cols() != X.cols())
    throw std::invalid_argument("lambda_max: Y and X need equal sample length");
  return (X * Y.transpose()).cwiseAbs().maxCoeff();
}

LambdaGrid make_grid(double lmax, int size) {
  if (!(lmax > 0) || !std::isfinite(lmax))
    throw std::invalid_argument("make_grid: lmax must be positive and finite");
  if (size < 2) throw std::invalid_argument("make_grid: need at least 2 points");
  LambdaGrid g;
  g.values.resize(size);
  const double ratio = std::log(100.0) / (size - 1);
  for (int i = 0; i < size; ++i) g.values[i] = lmax * std::exp(-ratio * i);
  g.values.front() = lmax;          // guard against rounding at the ends
  g.values.back() = lmax / 100.0;
  return g;
}

}  // namespace varma
