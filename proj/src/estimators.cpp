#include "gals/estimators.hpp"

#include "gals/errors.hpp"
#include "gals/gmm.hpp"

#include <string>

namespace gals {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::ols: return "ols";
    case Estimator::wls: return "wls";
    case Estimator::gals: return "gals";
  }
  return "unknown";
}

namespace {

void finish(FitResult& fr, const Dataset& d, const CovarianceEstimate& cov) {
  fr.residuals = d.y - d.X * fr.beta_hat;
  fr.covariance = cov.matrix;
  fr.covariance_method = cov.method;
  fr.std_errors = cov.std_errors();
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-12);
  if (qr.rank() < X.cols()) throw NumericalError("least-squares design is rank deficient");
  return qr.solve(y);
}

void check_basis_size(const Dataset& d, const BasisSpec& spec) {
  const Eigen::Index m = spec.dimension();
  if (4 * m > d.n()) {
    throw DataError("basis dimension " + std::to_string(m) + " exceeds n/4 for n = " +
                    std::to_string(d.n()) + "; lower the degree");
  }
}

// OLS residuals of interpolated data are rounding noise, not a variance signal.
constexpr double kInterpolationTol = 1e-13;

VarianceModel first_stage_variance(const Dataset& d, const BasisSpec& spec,
                                   const FitResult& ols) {
  if (ols.residuals.norm() <= kInterpolationTol * d.y.norm()) {
    throw NumericalError("perfect fit, variance model undefined");
  }
  return fit_variance_model(ols.residuals, evaluate_basis(spec, d));
}

FitDiagnostics basis_diagnostics(const BasisSpec& spec) {
  FitDiagnostics diag;
  diag.K = spec.degree;
  diag.basis_family = spec.family;
  return diag;
}

FitResult gals_from_moments(const Dataset& d, const BasisSpec& spec, const FitResult& ols,
                            const VarianceModel& vm, InferenceOptions opts) {
  const MomentSystem ms = build_moment_system(d, ols.residuals, vm);
  if (ms.degenerate) {
    FitResult fr = ols;
    fr.estimator = Estimator::gals;
    fr.variance_model = vm;
    fr.diagnostics = basis_diagnostics(spec);
    fr.diagnostics.degenerate_fallback = true;
    fr.diagnostics.cond_omega = ms.cond_omega;
    fr.diagnostics.ridge_lambda = ms.ridge_lambda;
    return fr;
  }

  FitResult fr;
  fr.estimator = Estimator::gals;
  fr.beta_hat = solve_gals(ms);
  const bool sandwich = ms.ridge_lambda > 0.0 || opts.gals == CovarianceMethod::gmm_sandwich;
  finish(fr, d, sandwich ? gmm_sandwich(ms, ms.W) : gals_covariance(ms));
  fr.variance_model = vm;
  fr.diagnostics = basis_diagnostics(spec);
  fr.diagnostics.cond_omega = ms.cond_omega;
  fr.diagnostics.ridge_lambda = ms.ridge_lambda;
  return fr;
}

}  // namespace

FitResult fit_ols(const Dataset& d, InferenceOptions opts) {
  FitResult fr;
  fr.estimator = Estimator::ols;
  fr.beta_hat = least_squares(d.X, d.y);
  fr.residuals = d.y - d.X * fr.beta_hat;
  finish(fr, d, hc_covariance(d.X, fr.residuals, std::nullopt, opts.robust));
  return fr;
}

FitResult fit_wls(const Dataset& d, const VarianceModel& vm, InferenceOptions opts) {
  if (vm.inv_sigma2.size() != d.n()) throw DataError("variance model does not match the dataset");
  const Eigen::VectorXd root_w = vm.inv_sigma2.cwiseSqrt();
  FitResult fr;
  fr.estimator = Estimator::wls;
  fr.beta_hat = least_squares(root_w.asDiagonal() * d.X, root_w.asDiagonal() * d.y);
  fr.residuals = d.y - d.X * fr.beta_hat;
  finish(fr, d, hc_covariance(d.X, fr.residuals, vm.inv_sigma2, opts.robust));
  fr.variance_model = vm;
  return fr;
}

FitResult fit_gals(const Dataset& d, const BasisSpec& spec, InferenceOptions opts) {
  check_basis_size(d, spec);
  const FitResult ols = fit_ols(d, opts);
  const VarianceModel vm = first_stage_variance(d, spec, ols);
  return gals_from_moments(d, spec, ols, vm, opts);
}

EstimatorSet fit_all(const Dataset& d, const BasisSpec& spec, InferenceOptions opts) {
  check_basis_size(d, spec);
  EstimatorSet out;
  out.ols = fit_ols(d, opts);
  const VarianceModel vm = first_stage_variance(d, spec, out.ols);
  out.wls = fit_wls(d, vm, opts);
  out.wls.diagnostics = basis_diagnostics(spec);
  out.gals = gals_from_moments(d, spec, out.ols, vm, opts);
  return out;
}

}  // namespace gals
