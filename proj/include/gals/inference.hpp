#pragma once

#include "gals/gmm.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace gals {

enum class CovarianceMethod { hc0, hc1, gmm_optimal, gmm_sandwich };

std::string_view to_string(CovarianceMethod m);
CovarianceMethod parse_covariance_method(std::string_view s);  // throws std::invalid_argument

/// Sampling covariance of beta_hat (already divided by n).
struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  CovarianceMethod method = CovarianceMethod::hc1;
  double dof_adjustment = 1.0;

  Eigen::VectorXd std_errors() const;
};

/// White sandwich B^-1 M B^-1 / n with B = (1/n) sum w X X' and
/// M = (1/n) sum w^2 e^2 X X'; w = 1 for OLS, 1/sigma2 for WLS. HC1 scales by
/// n / (n - p).
CovarianceEstimate hc_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                                 const std::optional<Eigen::VectorXd>& weights,
                                 CovarianceMethod variant);

/// (1/n) (G'WG)^{-1}, valid when W is the inverse of Omega_hat.
CovarianceEstimate gals_covariance(const MomentSystem& ms);

/// (1/n) (G'WG)^{-1} G'W Omega W G (G'WG)^{-1} for an arbitrary weight.
CovarianceEstimate gmm_sandwich(const MomentSystem& ms, const Eigen::MatrixXd& W_used);

/// Two-sided standard normal critical value z_{(1+level)/2}.
double normal_critical_value(double level);

struct FitResult;

/// beta_j -/+ z * se_j. Throws std::invalid_argument unless 0 < level < 1.
std::vector<std::pair<double, double>> confidence_interval(const FitResult& fr, double level);
std::vector<std::pair<double, double>> confidence_interval(const Eigen::VectorXd& beta,
                                                           const Eigen::VectorXd& se,
                                                           double level);

}  // namespace gals
