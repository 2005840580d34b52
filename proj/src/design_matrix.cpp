#include "gals/design_matrix.hpp"

#include "gals/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gals {

namespace {

constexpr double kRankTolerance = 1e-10;

bool all_ones(const Eigen::MatrixXd& X, Eigen::Index col) {
  return (X.col(col).array() == 1.0).all();
}

}  // namespace

Dataset build_dataset(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_raw,
                      bool intercept, std::vector<std::string> names) {
  if (X_raw.rows() == 0 || X_raw.cols() == 0) {
    throw DataError("design matrix is empty");
  }
  if (y.size() != X_raw.rows()) {
    std::ostringstream os;
    os << "response has " << y.size() << " rows but design has " << X_raw.rows();
    throw DataError(os.str());
  }
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != X_raw.cols()) {
    throw DataError("column name count does not match design columns");
  }
  if (names.empty()) {
    for (Eigen::Index j = 0; j < X_raw.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw DataError("non-finite response at row " + std::to_string(i + 1));
    }
  }
  for (Eigen::Index j = 0; j < X_raw.cols(); ++j) {
    for (Eigen::Index i = 0; i < X_raw.rows(); ++i) {
      if (!std::isfinite(X_raw(i, j))) {
        throw DataError("non-finite regressor '" + names[j] + "' at row " + std::to_string(i + 1));
      }
    }
  }

  Dataset d;
  d.y = y;
  bool has_ones = false;
  for (Eigen::Index j = 0; j < X_raw.cols(); ++j) has_ones = has_ones || all_ones(X_raw, j);
  if (intercept && !has_ones) {
    d.X.resize(X_raw.rows(), X_raw.cols() + 1);
    d.X.col(0).setOnes();
    d.X.rightCols(X_raw.cols()) = X_raw;
    d.column_names.push_back("intercept");
  } else {
    d.X = X_raw;
  }
  d.column_names.insert(d.column_names.end(), names.begin(), names.end());

  if (d.n() < d.p() + 1) {
    std::ostringstream os;
    os << "need at least p + 1 = " << d.p() + 1 << " observations, got " << d.n();
    throw DataError(os.str());
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.X, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[sv.size() - 1];
  if (!(smax > 0.0) || smin / smax <= kRankTolerance) {
    // Columns loading on the weakest right singular vector are the culprits.
    Eigen::VectorXd v = svd.matrixV().col(sv.size() - 1).cwiseAbs();
    const double vmax = v.maxCoeff();
    std::ostringstream os;
    os << "design matrix is rank deficient; collinear columns:";
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (v[j] > 1e-3 * vmax) os << " '" << d.column_names[j] << "'";
    }
    throw DataError(os.str());
  }
  return d;
}

bool is_constant_range(double lo, double hi) {
  return (hi - lo) <= 1e-12 * std::max(1.0, std::abs(hi));
}

Eigen::Index ColumnScaling::active_columns() const {
  return std::count(excluded.begin(), excluded.end(), false);
}

double ColumnScaling::scale(Eigen::Index col, double x, double limit) const {
  // -1 + 2 t keeps the extremes exact: t is exactly 0 or 1 there.
  const double t = (x - lo[col]) / (hi[col] - lo[col]);
  return std::clamp(-1.0 + 2.0 * t, -limit, limit);
}

double ColumnScaling::unscale(Eigen::Index col, double s) const {
  return lo[col] + (s + 1.0) * 0.5 * (hi[col] - lo[col]);
}

ColumnScaling fit_scaling(const Dataset& d) {
  ColumnScaling s;
  s.lo = d.X.colwise().minCoeff().transpose();
  s.hi = d.X.colwise().maxCoeff().transpose();
  s.excluded.resize(d.p());
  for (Eigen::Index j = 0; j < d.p(); ++j) s.excluded[j] = is_constant_range(s.lo[j], s.hi[j]);
  return s;
}

}  // namespace gals
