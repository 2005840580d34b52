#pragma once

#include "gals/basis.hpp"
#include "gals/design_matrix.hpp"
#include "gals/inference.hpp"
#include "gals/variance_model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>

namespace gals {

enum class Estimator { ols, wls, gals };

std::string_view to_string(Estimator e);

struct FitDiagnostics {
  bool degenerate_fallback = false;
  std::optional<double> cond_omega;
  double ridge_lambda = 0.0;
  std::optional<int> K;
  std::optional<BasisFamily> basis_family;
};

struct FitResult {
  Estimator estimator = Estimator::ols;
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd covariance;
  CovarianceMethod covariance_method = CovarianceMethod::hc1;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd residuals;  // y - X beta_hat
  std::optional<VarianceModel> variance_model;
  FitDiagnostics diagnostics;
};

/// Covariance choices. GALS uses gmm_optimal unless a ridge was applied, in
/// which case the sandwich is substituted automatically.
struct InferenceOptions {
  CovarianceMethod robust = CovarianceMethod::hc1;  // OLS and WLS
  CovarianceMethod gals = CovarianceMethod::gmm_optimal;
};

FitResult fit_ols(const Dataset& d, InferenceOptions opts = {});
FitResult fit_wls(const Dataset& d, const VarianceModel& vm, InferenceOptions opts = {});

/// OLS residuals, log-variance model on the basis, then the stacked-moment
/// solve. Falls back to the OLS fit (degenerate_fallback = true) when the
/// moment covariance cannot be inverted or the variance model is flat.
/// Throws DataError when the basis dimension exceeds n / 4.
FitResult fit_gals(const Dataset& d, const BasisSpec& spec, InferenceOptions opts = {});

struct EstimatorSet {
  FitResult ols;
  FitResult wls;
  FitResult gals;
};

/// All three estimators sharing one OLS fit and one variance model.
EstimatorSet fit_all(const Dataset& d, const BasisSpec& spec, InferenceOptions opts = {});

}  // namespace gals
