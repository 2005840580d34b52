#pragma once

#include "gals/basis.hpp"

#include <Eigen/Dense>

namespace gals {

/// Fitted log-linear heteroscedasticity model sigma^2(X) = exp(P(X) delta).
struct VarianceModel {
  Eigen::VectorXd delta;
  Eigen::VectorXd sigma2;
  Eigen::VectorXd inv_sigma2;  // diagonal of the WLS weight matrix D
  double clamp_lo = 0.0;
  double clamp_hi = 0.0;
  int floor_applied = 0;
  int clamp_applied = 0;
  bool homoscedastic_flag = false;

  /// Wraps a known variance vector (no fitted delta). The clamp interval is
  /// taken from its geometric mean, and the homoscedastic flag is set when the
  /// log variances are constant.
  static VarianceModel from_sigma2(const Eigen::VectorXd& sigma2);
};

/// Regresses log(max(e_i^2, floor)) on P, floor = 1e-12 * mean(e^2), and
/// exponentiates the fit. Fitted variances are clamped to [g/1e4, g*1e4], g
/// the geometric mean of the unclamped fit.
///
/// Throws NumericalError when every residual is zero or when P is collinear
/// (the message names the offending basis columns), DataError on shape errors.
VarianceModel fit_variance_model(const Eigen::VectorXd& residuals, const BasisMatrix& basis);

/// exp(P_new delta), clamped to the model's interval.
Eigen::VectorXd predict_sigma2(const VarianceModel& vm, const BasisMatrix& basis_new);

}  // namespace gals
