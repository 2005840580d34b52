#include "gals/cli.hpp"

#include "gals/csv.hpp"
#include "gals/errors.hpp"
#include "gals/estimators.hpp"
#include "gals/report.hpp"
#include "gals/simulation.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <set>

namespace gals::cli {

namespace {

struct FitConfig {
  std::string data_path;
  std::string response_column;
  std::vector<std::string> regressor_columns;
  bool no_intercept = false;
  std::string estimator = "all";
  std::string basis_family = "chebyshev";
  int degree = 2;
  std::string se_method;
  std::string output_format = "table";
  double ci_level = 0.95;
};

struct SimulateConfig {
  std::string dgp;
  long long n = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  std::vector<double> beta;
  std::vector<double> gamma;
  int degree = 2;
  std::string basis = "chebyshev";
  std::string error = "normal";
  std::string x_dist = "normal";
  std::string output_format = "table";
  unsigned threads = 0;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int do_fit(const FitConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0)) {
    err << "error: --ci-level must lie strictly between 0 and 1\n";
    return kUsage;
  }
  std::set<std::string> seen{cfg.response_column};
  for (const auto& c : cfg.regressor_columns) {
    if (!seen.insert(c).second) {
      err << "error: column '" << c << "' is referenced more than once\n";
      return kUsage;
    }
  }

  InferenceOptions inf;
  if (!cfg.se_method.empty()) {
    const CovarianceMethod m = parse_covariance_method(cfg.se_method);
    if (m == CovarianceMethod::hc0 || m == CovarianceMethod::hc1) {
      inf.robust = m;
    } else {
      inf.gals = m;
    }
  }

  const io::CsvTable table = io::read_csv_file(cfg.data_path);
  const Eigen::VectorXd y = table.numeric_column(cfg.response_column);
  Eigen::MatrixXd X(y.size(), static_cast<Eigen::Index>(cfg.regressor_columns.size()));
  for (std::size_t j = 0; j < cfg.regressor_columns.size(); ++j) {
    X.col(static_cast<Eigen::Index>(j)) = table.numeric_column(cfg.regressor_columns[j]);
  }
  const Dataset d = build_dataset(y, X, !cfg.no_intercept, cfg.regressor_columns);
  err << "fit: n = " << d.n() << ", p = " << d.p() << ", estimator = " << cfg.estimator << "\n";

  std::vector<FitResult> fits;
  const BasisOptions bo{parse_basis_family(cfg.basis_family), cfg.degree};
  if (cfg.estimator == "ols") {
    fits.push_back(fit_ols(d, inf));
  } else {
    const BasisSpec spec = make_basis_spec(d, bo);
    EstimatorSet all = fit_all(d, spec, inf);
    if (cfg.estimator == "wls") {
      fits.push_back(std::move(all.wls));
    } else if (cfg.estimator == "gals") {
      fits.push_back(std::move(all.gals));
    } else {
      fits = {std::move(all.ols), std::move(all.wls), std::move(all.gals)};
    }
  }

  if (cfg.output_format == "json") {
    out << io::dump_json(io::fit_report(d, fits, cfg.ci_level));
  } else {
    out << io::fit_table(d, fits, cfg.ci_level);
  }
  return kOk;
}

int do_simulate(const SimulateConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.reps < kMinReplications) {
    err << "error: --reps must be at least " << kMinReplications << "\n";
    return kUsage;
  }
  DgpSpec spec;
  try {
    spec.variance_family = parse_variance_family(cfg.dgp);
    spec.error_distribution = parse_error_distribution(cfg.error);
    spec.beta_true = to_vector(cfg.beta);
    spec.gamma = to_vector(cfg.gamma);
    spec.n = static_cast<Eigen::Index>(cfg.n);
    spec.x_distribution =
        cfg.x_dist == "uniform" ? XDistribution::uniform : XDistribution::standard_normal;
    validate(spec);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  const BasisOptions bo{parse_basis_family(cfg.basis), cfg.degree};
  err << "simulate: " << cfg.dgp << ", n = " << cfg.n << ", reps = " << cfg.reps
      << ", seed = " << cfg.seed << "\n";
  const SimulationReport report = run_monte_carlo(spec, cfg.reps, bo, cfg.seed, cfg.threads);
  if (cfg.output_format == "json") {
    out << io::dump_json(io::simulation_report(report));
  } else {
    out << io::simulation_table(report);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heteroscedasticity-adaptive least squares (OLS / WLS / GALS)", "gals"};
  app.require_subcommand(1);

  FitConfig fit_cfg;
  CLI::App* fit = app.add_subcommand("fit", "Fit OLS, WLS and GALS to a CSV file");
  fit->add_option("--data", fit_cfg.data_path, "CSV file with a header row")->required();
  fit->add_option("--response", fit_cfg.response_column, "Response column")->required();
  fit->add_option("--regressors", fit_cfg.regressor_columns, "Regressor columns (comma list)")
      ->required()
      ->delimiter(',');
  fit->add_flag("--no-intercept", fit_cfg.no_intercept, "Do not add an intercept column");
  fit->add_option("--estimator", fit_cfg.estimator)
      ->check(CLI::IsMember({"ols", "wls", "gals", "all"}));
  fit->add_option("--basis", fit_cfg.basis_family)->check(CLI::IsMember({"chebyshev", "power"}));
  fit->add_option("--degree", fit_cfg.degree, "Basis degree K per regressor")
      ->check(CLI::PositiveNumber);
  fit->add_option("--se", fit_cfg.se_method, "Covariance override")
      ->check(CLI::IsMember({"hc0", "hc1", "gmm_optimal", "gmm_sandwich"}));
  fit->add_option("--output", fit_cfg.output_format)->check(CLI::IsMember({"json", "table"}));
  fit->add_option("--ci-level", fit_cfg.ci_level, "Confidence level in (0, 1)");

  SimulateConfig sim_cfg;
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo comparison of OLS, WLS and GALS");
  sim->add_option("--dgp", sim_cfg.dgp)
      ->required()
      ->check(CLI::IsMember({"loglinear", "absolute", "homoscedastic", "quadratic"}));
  sim->add_option("--n", sim_cfg.n, "Sample size")->required()->check(CLI::PositiveNumber);
  sim->add_option("--reps", sim_cfg.reps, "Replications (>= 100)")->required();
  sim->add_option("--seed", sim_cfg.seed, "Root seed")->required();
  sim->add_option("--beta", sim_cfg.beta, "True coefficients, intercept first")
      ->required()
      ->delimiter(',');
  sim->add_option("--gamma", sim_cfg.gamma, "Variance parameters")->required()->delimiter(',');
  sim->add_option("--degree", sim_cfg.degree)->check(CLI::PositiveNumber);
  sim->add_option("--basis", sim_cfg.basis)->check(CLI::IsMember({"chebyshev", "power"}));
  sim->add_option("--error", sim_cfg.error)->check(CLI::IsMember({"normal", "t5"}));
  sim->add_option("--x-dist", sim_cfg.x_dist)->check(CLI::IsMember({"normal", "uniform"}));
  sim->add_option("--output", sim_cfg.output_format)->check(CLI::IsMember({"json", "table"}));
  sim->add_option("--threads", sim_cfg.threads, "Worker threads (0 = all cores)");

  std::vector<const char*> argv{"gals"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (fit->parsed()) return do_fit(fit_cfg, out, err);
    return do_simulate(sim_cfg, out, err);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace gals::cli
