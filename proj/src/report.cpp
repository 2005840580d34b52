#include "gals/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace gals::io {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vector_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

Json row_major(const Eigen::MatrixXd& m) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(number(m(i, j)));
  }
  return arr;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += ": ";
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_into(el, indent, depth + 1, out);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

Json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : Json(nullptr);
}

Json fit_block(const Dataset& d, const FitResult& fr, double ci_level) {
  Json block;
  block["name"] = std::string(to_string(fr.estimator));
  block["covariance_method"] = std::string(to_string(fr.covariance_method));
  const auto ci = confidence_interval(fr, ci_level);
  Json coefs = Json::array();
  for (Eigen::Index j = 0; j < fr.beta_hat.size(); ++j) {
    Json c;
    c["label"] = d.column_names[j];
    c["estimate"] = number(fr.beta_hat[j]);
    c["std_error"] = number(fr.std_errors[j]);
    c["ci_lo"] = number(ci[j].first);
    c["ci_hi"] = number(ci[j].second);
    coefs.push_back(std::move(c));
  }
  block["coefficients"] = std::move(coefs);
  block["covariance"] = row_major(fr.covariance);

  const FitDiagnostics& dg = fr.diagnostics;
  Json diag;
  diag["degenerate_fallback"] = dg.degenerate_fallback;
  diag["cond_omega"] = optional_number(dg.cond_omega);
  diag["ridge_lambda"] = number(dg.ridge_lambda);
  diag["K"] = dg.K ? Json(*dg.K) : Json(nullptr);
  diag["basis_family"] = dg.basis_family ? Json(std::string(to_string(*dg.basis_family)))
                                         : Json(nullptr);
  diag["n"] = d.n();
  diag["p"] = d.p();
  block["diagnostics"] = std::move(diag);
  return block;
}

Json summary_json(const EstimatorSummary& s) {
  Json j;
  j["mean_bias"] = vector_json(s.mean_bias);
  j["empirical_covariance"] = row_major(s.empirical_covariance);
  j["mean_se"] = vector_json(s.mean_se);
  j["coverage_95"] = vector_json(s.coverage_95);
  j["rmse"] = vector_json(s.rmse);
  return j;
}

std::string six(double v) {
  if (!std::isfinite(v)) return "NA";
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

Json fit_report(const Dataset& d, const std::vector<FitResult>& fits, double ci_level) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "fit";
  doc["ci_level"] = number(ci_level);
  Json blocks = Json::array();
  for (const auto& fr : fits) blocks.push_back(fit_block(d, fr, ci_level));
  doc["estimators"] = std::move(blocks);
  return doc;
}

Json simulation_report(const SimulationReport& r) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "simulate";
  Json dgp;
  dgp["variance_family"] = std::string(to_string(r.dgp.variance_family));
  dgp["beta_true"] = vector_json(r.dgp.beta_true);
  dgp["gamma"] = vector_json(r.dgp.gamma);
  dgp["x_distribution"] = std::string(to_string(r.dgp.x_distribution));
  dgp["error_distribution"] = std::string(to_string(r.dgp.error_distribution));
  dgp["n"] = r.dgp.n;
  doc["dgp"] = std::move(dgp);
  doc["basis"] = {{"family", std::string(to_string(r.basis.family))}, {"K", r.basis.degree}};
  doc["seed"] = r.seed;
  doc["replications"] = r.replications;
  doc["completed"] = r.completed;
  doc["skipped"] = r.skipped;
  doc["fallback_rate"] = number(r.fallback_rate);
  Json est;
  est["ols"] = summary_json(r.ols);
  est["wls"] = summary_json(r.wls);
  est["gals"] = summary_json(r.gals);
  doc["estimators"] = std::move(est);
  Json eff;
  eff["gals_ols"] = vector_json(r.efficiency_gals_ols);
  eff["gals_wls"] = vector_json(r.efficiency_gals_wls);
  eff["wls_ols"] = vector_json(r.efficiency_wls_ols);
  doc["relative_efficiency"] = std::move(eff);
  return doc;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  out += '\n';
  return out;
}

std::string fit_table(const Dataset& d, const std::vector<FitResult>& fits, double ci_level) {
  std::ostringstream os;
  os << "n = " << d.n() << ", p = " << d.p() << ", CI level = " << six(ci_level) << "\n";
  for (const auto& fr : fits) {
    const auto ci = confidence_interval(fr, ci_level);
    os << "\n" << to_string(fr.estimator) << " (" << to_string(fr.covariance_method) << ")";
    if (fr.diagnostics.degenerate_fallback) os << "  [degenerate: OLS fallback]";
    os << "\n";
    os << std::left << std::setw(16) << "term" << std::right << std::setw(14) << "estimate"
       << std::setw(14) << "std.error" << std::setw(14) << "ci.lo" << std::setw(14) << "ci.hi"
       << "\n";
    for (Eigen::Index j = 0; j < fr.beta_hat.size(); ++j) {
      os << std::left << std::setw(16) << d.column_names[j] << std::right << std::setw(14)
         << six(fr.beta_hat[j]) << std::setw(14) << six(fr.std_errors[j]) << std::setw(14)
         << six(ci[j].first) << std::setw(14) << six(ci[j].second) << "\n";
    }
    if (fr.diagnostics.cond_omega) {
      os << "cond(Omega) = " << six(*fr.diagnostics.cond_omega)
         << ", ridge = " << six(fr.diagnostics.ridge_lambda) << "\n";
    }
  }
  return os.str();
}

std::string simulation_table(const SimulationReport& r) {
  std::ostringstream os;
  os << "dgp = " << to_string(r.dgp.variance_family) << ", n = " << r.dgp.n
     << ", replications = " << r.completed << "/" << r.replications << ", seed = " << r.seed
     << "\n";
  os << "basis = " << to_string(r.basis.family) << " K=" << r.basis.degree
     << ", GALS fallback rate = " << six(r.fallback_rate) << "\n\n";
  os << std::left << std::setw(8) << "est" << std::setw(6) << "coef" << std::right
     << std::setw(14) << "bias" << std::setw(14) << "emp.var" << std::setw(14) << "mean.se"
     << std::setw(14) << "cover95" << std::setw(14) << "rmse" << "\n";
  const std::pair<const char*, const EstimatorSummary*> rows[] = {
      {"ols", &r.ols}, {"wls", &r.wls}, {"gals", &r.gals}};
  for (const auto& [name, s] : rows) {
    for (Eigen::Index j = 0; j < s->mean_bias.size(); ++j) {
      os << std::left << std::setw(8) << name << std::setw(6) << j << std::right << std::setw(14)
         << six(s->mean_bias[j]) << std::setw(14) << six(s->empirical_covariance(j, j))
         << std::setw(14) << six(s->mean_se[j]) << std::setw(14) << six(s->coverage_95[j])
         << std::setw(14) << six(s->rmse[j]) << "\n";
    }
  }
  os << "\nrelative efficiency (variance ratios)\n";
  for (Eigen::Index j = 0; j < r.efficiency_gals_ols.size(); ++j) {
    os << "coef " << j << ": gals/ols = " << six(r.efficiency_gals_ols[j])
       << ", gals/wls = " << six(r.efficiency_gals_wls[j])
       << ", wls/ols = " << six(r.efficiency_wls_ols[j]) << "\n";
  }
  return os.str();
}

}  // namespace gals::io
