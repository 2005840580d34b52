#pragma once

#include "gals/basis.hpp"
#include "gals/design_matrix.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gals {

enum class VarianceFamily { loglinear, absolute, homoscedastic, quadratic };
enum class XDistribution { standard_normal, uniform };  // uniform on (-1, 1)
enum class ErrorDistribution { normal, scaled_t5 };

std::string_view to_string(VarianceFamily f);
std::string_view to_string(XDistribution f);
std::string_view to_string(ErrorDistribution f);
VarianceFamily parse_variance_family(std::string_view s);
ErrorDistribution parse_error_distribution(std::string_view s);

/// Data-generating process y = X beta + sigma*(x_1) z, X = [1, x_1, ..., x_{p-1}].
///
/// The conditional variance depends on the first regressor only:
///   loglinear      gamma = (g0, g1)  exp(g0 + g1 x)
///   absolute       gamma = (g1)      (0.1 + g1 |x|)^2,  g1 >= 0
///   homoscedastic  gamma = (g0)      g0 > 0
///   quadratic      gamma = (g0, g1)  g0 (1 + g1 x^2),   g0 > 0, g1 >= 0
struct DgpSpec {
  Eigen::VectorXd beta_true;
  VarianceFamily variance_family = VarianceFamily::loglinear;
  Eigen::VectorXd gamma;
  XDistribution x_distribution = XDistribution::standard_normal;
  Eigen::Index n = 1000;
  ErrorDistribution error_distribution = ErrorDistribution::normal;
};

/// Throws std::invalid_argument for malformed or non-positive parameters.
void validate(const DgpSpec& spec);

double true_variance(const DgpSpec& spec, double x);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Seed of replication r: mix64(mix64(root) + (r + 1) * 0x9E3779B97F4A7C15).
std::uint64_t child_seed(std::uint64_t root, std::uint64_t r);

/// mt19937_64 stream with fixed, platform-independent conversions to
/// uniforms (53-bit), normals (Marsaglia polar) and Student-t.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();  // [0, 1)
  double normal();
  double student_t(int dof);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct Sample {
  Dataset data;
  Eigen::VectorXd true_sigma2;
};

/// Deterministic in (spec, seed).
Sample generate_sample(const DgpSpec& spec, std::uint64_t seed);

struct EstimatorSummary {
  Eigen::VectorXd mean_bias;
  Eigen::MatrixXd empirical_covariance;
  Eigen::VectorXd mean_se;
  Eigen::VectorXd coverage_95;
  Eigen::VectorXd rmse;
};

struct SimulationReport {
  DgpSpec dgp;
  BasisOptions basis;
  std::uint64_t seed = 0;
  int replications = 0;  // requested
  int completed = 0;
  int skipped = 0;
  EstimatorSummary ols;
  EstimatorSummary wls;
  EstimatorSummary gals;
  Eigen::VectorXd efficiency_gals_ols;  // per-coefficient variance ratios
  Eigen::VectorXd efficiency_gals_wls;
  Eigen::VectorXd efficiency_wls_ols;
  double fallback_rate = 0.0;
};

inline constexpr int kMinReplications = 100;

/// Runs R replications over `threads` workers (0 = hardware concurrency).
/// Results are identical for every thread count. Failed replications are
/// skipped and counted; more than 1% skips throws NumericalError.
SimulationReport run_monte_carlo(const DgpSpec& spec, int R, BasisOptions basis,
                                 std::uint64_t seed, unsigned threads = 0);

}  // namespace gals
