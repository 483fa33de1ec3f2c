#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace varma {

/// Which side of the model a lag polynomial lives on.  AR polynomials are
/// read as I - sum_l C_l L^l, MA polynomials as I + sum_m C_m L^m, so the
/// stored coefficient blocks always appear with a plus sign in the model
/// equation y_t = sum Phi_l y_{t-l} + sum Theta_m a_{t-m} + a_t.
enum class SignConvention { ar, ma };

/// Matrix lag polynomial: `coeffs[l-1]` is the d x d block at lag l.
struct LagPolynomial {
  int dim = 0;
  SignConvention convention = SignConvention::ar;
  std::vector<Eigen::MatrixXd> coeffs;

  int order() const { return static_cast<int>(coeffs.size()); }

  static LagPolynomial ar(int dim, std::vector<Eigen::MatrixXd> coeffs) {
    LagPolynomial p{dim, SignConvention::ar, std::move(coeffs)};
    p.validate();
    return p;
  }
  static LagPolynomial ma(int dim, std::vector<Eigen::MatrixXd> coeffs) {
    LagPolynomial p{dim, SignConvention::ma, std::move(coeffs)};
    p.validate();
    return p;
  }

  void validate() const {
    if (dim < 1) throw std::invalid_argument("lag polynomial: dim must be >= 1");
    for (std::size_t l = 0; l < coeffs.size(); ++l) {
      const auto& c = coeffs[l];
      if (c.rows() != dim || c.cols() != dim)
        throw std::invalid_argument("lag polynomial: coefficient at lag " +
                                    std::to_string(l + 1) + " is not " +
                                    std::to_string(dim) + "x" + std::to_string(dim));
      if (!c.allFinite())
        throw std::invalid_argument("lag polynomial: non-finite coefficient at lag " +
                                    std::to_string(l + 1));
    }
  }
};

/// Full model: y_t = sum Phi_l y_{t-l} + sum Theta_m a_{t-m} + a_t,
/// innovations a_t ~ N(0, sigma_a).
struct VarmaModel {
  LagPolynomial phi;      // convention ar
  LagPolynomial theta;    // convention ma
  Eigen::MatrixXd sigma_a;

  int dim() const { return phi.dim; }
  int p() const { return phi.order(); }
  int q() const { return theta.order(); }

  void validate() const;
};

/// Observed multivariate series, rows = time.
struct PanelData {
  Eigen::MatrixXd values;           // T x d
  std::vector<std::string> names;   // empty or size d

  long T() const { return values.rows(); }
  long dim() const { return values.cols(); }

  void validate() const {
    if (values.rows() < 1 || values.cols() < 1)
      throw std::invalid_argument("panel: need at least one row and one column");
    if (!values.allFinite())
      throw std::invalid_argument("panel: non-finite values");
    if (!names.empty() && static_cast<long>(names.size()) != values.cols())
      throw std::invalid_argument("panel: name count does not match column count");
  }
};

}  // namespace varma
