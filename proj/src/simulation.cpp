#include "gals/simulation.hpp"

#include "gals/errors.hpp"
#include "gals/estimators.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace gals {

std::string_view to_string(VarianceFamily f) {
  switch (f) {
    case VarianceFamily::loglinear: return "loglinear";
    case VarianceFamily::absolute: return "absolute";
    case VarianceFamily::homoscedastic: return "homoscedastic";
    case VarianceFamily::quadratic: return "quadratic";
  }
  return "unknown";
}

std::string_view to_string(XDistribution f) {
  return f == XDistribution::standard_normal ? "standard_normal" : "uniform";
}

std::string_view to_string(ErrorDistribution f) {
  return f == ErrorDistribution::normal ? "normal" : "t5";
}

VarianceFamily parse_variance_family(std::string_view s) {
  if (s == "loglinear") return VarianceFamily::loglinear;
  if (s == "absolute") return VarianceFamily::absolute;
  if (s == "homoscedastic") return VarianceFamily::homoscedastic;
  if (s == "quadratic") return VarianceFamily::quadratic;
  throw std::invalid_argument("unknown variance family '" + std::string(s) + "'");
}

ErrorDistribution parse_error_distribution(std::string_view s) {
  if (s == "normal") return ErrorDistribution::normal;
  if (s == "t5") return ErrorDistribution::scaled_t5;
  throw std::invalid_argument("unknown error distribution '" + std::string(s) + "'");
}

void validate(const DgpSpec& spec) {
  if (spec.beta_true.size() < 2) {
    throw std::invalid_argument("beta must have at least two entries (intercept and slope)");
  }
  if (spec.n < spec.beta_true.size() + 1) {
    throw std::invalid_argument("sample size too small for the number of coefficients");
  }
  const auto& g = spec.gamma;
  auto need = [&](Eigen::Index count) {
    if (g.size() != count) {
      throw std::invalid_argument(std::string(to_string(spec.variance_family)) + " variance takes " +
                                  std::to_string(count) + " gamma value(s)");
    }
    if (!g.allFinite()) throw std::invalid_argument("gamma must be finite");
  };
  switch (spec.variance_family) {
    case VarianceFamily::loglinear:
      need(2);
      break;
    case VarianceFamily::absolute:
      need(1);
      if (g[0] < 0.0) throw std::invalid_argument("absolute variance needs gamma >= 0");
      break;
    case VarianceFamily::homoscedastic:
      need(1);
      if (!(g[0] > 0.0)) throw std::invalid_argument("homoscedastic variance needs gamma > 0");
      break;
    case VarianceFamily::quadratic:
      need(2);
      if (!(g[0] > 0.0) || g[1] < 0.0) {
        throw std::invalid_argument("quadratic variance needs gamma0 > 0 and gamma1 >= 0");
      }
      break;
  }
}

double true_variance(const DgpSpec& spec, double x) {
  const auto& g = spec.gamma;
  switch (spec.variance_family) {
    case VarianceFamily::loglinear: return std::exp(g[0] + g[1] * x);
    case VarianceFamily::absolute: {
      const double s = 0.1 + g[0] * std::abs(x);
      return s * s;
    }
    case VarianceFamily::homoscedastic: return g[0];
    case VarianceFamily::quadratic: return g[0] * (1.0 + g[1] * x * x);
  }
  return 1.0;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t child_seed(std::uint64_t root, std::uint64_t r) {
  return mix64(mix64(root) + (r + 1) * 0x9E3779B97F4A7C15ULL);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::student_t(int dof) {
  const double z = normal();
  double chi2 = 0.0;
  for (int k = 0; k < dof; ++k) {
    const double e = normal();
    chi2 += e * e;
  }
  return z / std::sqrt(chi2 / dof);
}

Sample generate_sample(const DgpSpec& spec, std::uint64_t seed) {
  validate(spec);
  const Eigen::Index n = spec.n;
  const Eigen::Index p = spec.beta_true.size();
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  Eigen::VectorXd s2(n);
  // t5 has variance 5/3.
  const double t_scale = std::sqrt(3.0 / 5.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) {
      X(i, j) = spec.x_distribution == XDistribution::standard_normal ? rng.normal()
                                                                      : 2.0 * rng.uniform() - 1.0;
    }
    const double z = spec.error_distribution == ErrorDistribution::normal
                         ? rng.normal()
                         : t_scale * rng.student_t(5);
    s2[i] = true_variance(spec, X(i, 1));
    y[i] = X.row(i).dot(spec.beta_true) + std::sqrt(s2[i]) * z;
  }
  std::vector<std::string> names;
  for (Eigen::Index j = 1; j < p; ++j) names.push_back("x" + std::to_string(j));
  Sample out;
  out.data = build_dataset(y, X.rightCols(p - 1), true, std::move(names));
  out.true_sigma2 = std::move(s2);
  return out;
}

namespace {

struct Replication {
  bool ok = false;
  bool fallback = false;
  Eigen::MatrixXd beta;  // 3 x p, rows ols / wls / gals
  Eigen::MatrixXd se;
};

Replication run_one(const DgpSpec& spec, BasisOptions basis, std::uint64_t seed) {
  Replication rep;
  try {
    const Sample s = generate_sample(spec, seed);
    const BasisSpec bs = make_basis_spec(s.data, basis);
    const EstimatorSet fits = fit_all(s.data, bs);
    const Eigen::Index p = s.data.p();
    rep.beta.resize(3, p);
    rep.se.resize(3, p);
    const FitResult* all[] = {&fits.ols, &fits.wls, &fits.gals};
    for (int k = 0; k < 3; ++k) {
      rep.beta.row(k) = all[k]->beta_hat.transpose();
      rep.se.row(k) = all[k]->std_errors.transpose();
    }
    rep.fallback = fits.gals.diagnostics.degenerate_fallback;
    rep.ok = rep.beta.allFinite() && rep.se.allFinite();
  } catch (const std::exception&) {
    rep.ok = false;
  }
  return rep;
}

EstimatorSummary summarize(const std::vector<Replication>& reps, int row,
                           const Eigen::VectorXd& beta_true, double z95) {
  const Eigen::Index p = beta_true.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd sum_se = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd sq_err = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd covered = Eigen::VectorXd::Zero(p);
  int count = 0;
  for (const auto& rep : reps) {
    if (!rep.ok) continue;
    const Eigen::VectorXd b = rep.beta.row(row).transpose();
    const Eigen::VectorXd se = rep.se.row(row).transpose();
    sum += b;
    sum_se += se;
    sq_err += (b - beta_true).cwiseAbs2();
    for (Eigen::Index j = 0; j < p; ++j) {
      if (std::abs(b[j] - beta_true[j]) <= z95 * se[j]) covered[j] += 1.0;
    }
    ++count;
  }
  EstimatorSummary out;
  const double c = static_cast<double>(count);
  const Eigen::VectorXd mean = sum / c;
  out.mean_bias = mean - beta_true;
  out.mean_se = sum_se / c;
  out.coverage_95 = covered / c;
  out.rmse = (sq_err / c).cwiseSqrt();

  // Second pass around the mean, in replication order.
  out.empirical_covariance = Eigen::MatrixXd::Zero(p, p);
  for (const auto& rep : reps) {
    if (!rep.ok) continue;
    const Eigen::VectorXd dev = rep.beta.row(row).transpose() - mean;
    out.empirical_covariance += dev * dev.transpose();
  }
  out.empirical_covariance /= (c - 1.0);
  return out;
}

}  // namespace

SimulationReport run_monte_carlo(const DgpSpec& spec, int R, BasisOptions basis,
                                 std::uint64_t seed, unsigned threads) {
  validate(spec);
  if (R < kMinReplications) {
    throw std::invalid_argument("at least " + std::to_string(kMinReplications) +
                                " replications are required");
  }
  if (basis.degree < 1) throw std::invalid_argument("basis degree must be at least 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(R));

  std::vector<Replication> reps(R);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) {
      reps[r] = run_one(spec, basis, child_seed(seed, static_cast<std::uint64_t>(r)));
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SimulationReport report;
  report.dgp = spec;
  report.basis = basis;
  report.seed = seed;
  report.replications = R;
  int fallbacks = 0;
  for (const auto& rep : reps) {
    if (rep.ok) {
      ++report.completed;
      if (rep.fallback) ++fallbacks;
    } else {
      ++report.skipped;
    }
  }
  if (100 * report.skipped > R) {
    throw NumericalError(std::to_string(report.skipped) + " of " + std::to_string(R) +
                         " replications failed (limit 1%)");
  }

  const double z95 = normal_critical_value(0.95);
  report.ols = summarize(reps, 0, spec.beta_true, z95);
  report.wls = summarize(reps, 1, spec.beta_true, z95);
  report.gals = summarize(reps, 2, spec.beta_true, z95);
  const Eigen::VectorXd v_ols = report.ols.empirical_covariance.diagonal();
  const Eigen::VectorXd v_wls = report.wls.empirical_covariance.diagonal();
  const Eigen::VectorXd v_gals = report.gals.empirical_covariance.diagonal();
  report.efficiency_gals_ols = v_gals.cwiseQuotient(v_ols);
  report.efficiency_gals_wls = v_gals.cwiseQuotient(v_wls);
  report.efficiency_wls_ols = v_wls.cwiseQuotient(v_ols);
  report.fallback_rate = static_cast<double>(fallbacks) / report.completed;
  return report;
}

}  // namespace gals
