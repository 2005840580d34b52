#include "gals/inference.hpp"

#include "gals/errors.hpp"
#include "gals/estimators.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace gals {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M) { return 0.5 * (M + M.transpose()); }

// Inverse of a symmetric positive-definite "bread" matrix; throws if singular.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& M, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(M));
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (!(ev[0] > 1e-14 * ev[ev.size() - 1])) {
    throw NumericalError(std::string(what) + " is singular");
  }
  return symmetrize(es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                    es.eigenvectors().transpose());
}

}  // namespace

std::string_view to_string(CovarianceMethod m) {
  switch (m) {
    case CovarianceMethod::hc0: return "hc0";
    case CovarianceMethod::hc1: return "hc1";
    case CovarianceMethod::gmm_optimal: return "gmm_optimal";
    case CovarianceMethod::gmm_sandwich: return "gmm_sandwich";
  }
  return "unknown";
}

CovarianceMethod parse_covariance_method(std::string_view s) {
  if (s == "hc0") return CovarianceMethod::hc0;
  if (s == "hc1") return CovarianceMethod::hc1;
  if (s == "gmm_optimal") return CovarianceMethod::gmm_optimal;
  if (s == "gmm_sandwich") return CovarianceMethod::gmm_sandwich;
  throw std::invalid_argument("unknown covariance method '" + std::string(s) + "'");
}

Eigen::VectorXd CovarianceEstimate::std_errors() const {
  return matrix.diagonal().cwiseMax(0.0).cwiseSqrt();
}

CovarianceEstimate hc_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                                 const std::optional<Eigen::VectorXd>& weights,
                                 CovarianceMethod variant) {
  if (variant != CovarianceMethod::hc0 && variant != CovarianceMethod::hc1) {
    throw std::invalid_argument("hc_covariance supports hc0 and hc1 only");
  }
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (residuals.size() != n || (weights && weights->size() != n)) {
    throw DataError("residual and weight vectors must have one entry per observation");
  }
  const Eigen::ArrayXd w = weights ? Eigen::ArrayXd(weights->array()) : Eigen::ArrayXd::Ones(n);
  const double inv_n = 1.0 / static_cast<double>(n);

  const Eigen::MatrixXd bread = inv_n * X.transpose() * (w.matrix().asDiagonal() * X);
  const Eigen::ArrayXd meat_w = (w * residuals.array()).square();
  const Eigen::MatrixXd meat = inv_n * X.transpose() * (meat_w.matrix().asDiagonal() * X);
  const Eigen::MatrixXd b_inv = spd_inverse(bread, "weighted normal matrix");

  CovarianceEstimate out;
  out.method = variant;
  out.dof_adjustment = variant == CovarianceMethod::hc1
                           ? static_cast<double>(n) / static_cast<double>(n - p)
                           : 1.0;
  out.matrix = symmetrize(b_inv * meat * b_inv) * (inv_n * out.dof_adjustment);
  return out;
}

CovarianceEstimate gals_covariance(const MomentSystem& ms) {
  if (ms.degenerate) throw NumericalError("moment system is degenerate");
  const Eigen::MatrixXd H = ms.G_hat.transpose() * ms.W * ms.G_hat;
  CovarianceEstimate out;
  out.method = CovarianceMethod::gmm_optimal;
  out.matrix = spd_inverse(H, "G'WG") / static_cast<double>(ms.n);
  return out;
}

CovarianceEstimate gmm_sandwich(const MomentSystem& ms, const Eigen::MatrixXd& W_used) {
  const Eigen::MatrixXd GtW = ms.G_hat.transpose() * W_used;
  const Eigen::MatrixXd h_inv = spd_inverse(GtW * ms.G_hat, "G'WG");
  const Eigen::MatrixXd meat = GtW * ms.Omega_hat * GtW.transpose();
  CovarianceEstimate out;
  out.method = CovarianceMethod::gmm_sandwich;
  out.matrix = symmetrize(h_inv * meat * h_inv) / static_cast<double>(ms.n);
  return out;
}

double normal_critical_value(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level must lie strictly between 0 and 1");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
}

std::vector<std::pair<double, double>> confidence_interval(const Eigen::VectorXd& beta,
                                                           const Eigen::VectorXd& se,
                                                           double level) {
  const double z = normal_critical_value(level);
  std::vector<std::pair<double, double>> out;
  out.reserve(beta.size());
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    out.emplace_back(beta[j] - z * se[j], beta[j] + z * se[j]);
  }
  return out;
}

std::vector<std::pair<double, double>> confidence_interval(const FitResult& fr, double level) {
  return confidence_interval(fr.beta_hat, fr.std_errors, level);
}

}  // namespace gals
