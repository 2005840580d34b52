#include "gals/variance_model.hpp"

#include "gals/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gals {

namespace {

constexpr double kLogFloor = 1e-12;
constexpr double kClampRatio = 1e4;
constexpr double kFlatCoefficient = 1e-8;
constexpr double kFlatLogVariance = 1e-12;
constexpr double kCollinearTolerance = 1e-10;

double sample_variance(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

bool is_constant_column(const Eigen::MatrixXd& P, Eigen::Index k) {
  return (P.col(k).array() == P(0, k)).all();
}

}  // namespace

VarianceModel VarianceModel::from_sigma2(const Eigen::VectorXd& sigma2) {
  if ((sigma2.array() <= 0.0).any() || !sigma2.allFinite()) {
    throw DataError("variances must be finite and strictly positive");
  }
  VarianceModel vm;
  vm.sigma2 = sigma2;
  vm.inv_sigma2 = sigma2.cwiseInverse();
  const Eigen::VectorXd logs = sigma2.array().log().matrix();
  const double g = std::exp(logs.mean());
  vm.clamp_lo = g / kClampRatio;
  vm.clamp_hi = g * kClampRatio;
  vm.homoscedastic_flag = sample_variance(logs) <= kFlatLogVariance;
  return vm;
}

VarianceModel fit_variance_model(const Eigen::VectorXd& residuals, const BasisMatrix& basis) {
  const Eigen::MatrixXd& P = basis.P;
  const Eigen::Index n = residuals.size();
  if (P.rows() != n) {
    throw DataError("basis has " + std::to_string(P.rows()) + " rows, residuals have " +
                    std::to_string(n));
  }
  if (P.cols() == 0 || P.cols() > n) {
    throw DataError("basis dimension must be between 1 and the number of observations");
  }

  const Eigen::ArrayXd e2 = residuals.array().square();
  const double mean_e2 = e2.mean();
  if (!(mean_e2 > 0.0)) throw NumericalError("perfect fit, variance model undefined");

  VarianceModel vm;
  const double floor = kLogFloor * mean_e2;
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (e2[i] < floor) {
      target[i] = std::log(floor);
      ++vm.floor_applied;
    } else {
      target[i] = std::log(e2[i]);
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[sv.size() - 1] / sv[0] <= kCollinearTolerance) {
    Eigen::VectorXd v = svd.matrixV().col(sv.size() - 1).cwiseAbs();
    std::ostringstream os;
    os << "variance basis is collinear; offending columns:";
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      if (v[k] > 1e-3 * v.maxCoeff()) os << ' ' << k;
    }
    throw NumericalError(os.str());
  }
  vm.delta = svd.solve(target);

  const Eigen::VectorXd log_fit = P * vm.delta;
  const double g = std::exp(log_fit.mean());
  vm.clamp_lo = g / kClampRatio;
  vm.clamp_hi = g * kClampRatio;
  vm.sigma2.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = std::exp(log_fit[i]);
    if (s < vm.clamp_lo || s > vm.clamp_hi) ++vm.clamp_applied;
    vm.sigma2[i] = std::clamp(s, vm.clamp_lo, vm.clamp_hi);
  }
  vm.inv_sigma2 = vm.sigma2.cwiseInverse();

  double max_slope = 0.0;
  for (Eigen::Index k = 0; k < P.cols(); ++k) {
    if (!is_constant_column(P, k)) max_slope = std::max(max_slope, std::abs(vm.delta[k]));
  }
  const Eigen::VectorXd log_sigma2 = vm.sigma2.array().log().matrix();
  vm.homoscedastic_flag =
      max_slope <= kFlatCoefficient && sample_variance(log_sigma2) <= kFlatLogVariance;
  return vm;
}

Eigen::VectorXd predict_sigma2(const VarianceModel& vm, const BasisMatrix& basis_new) {
  if (basis_new.cols() != vm.delta.size()) {
    throw DataError("basis has " + std::to_string(basis_new.cols()) + " columns, model has " +
                    std::to_string(vm.delta.size()));
  }
  Eigen::VectorXd out = (basis_new.P * vm.delta).array().exp().matrix();
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], vm.clamp_lo, vm.clamp_hi);
  return out;
}

}  // namespace gals
