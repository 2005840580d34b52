#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gals {

/// Response vector and n x p design matrix (rows are observations).
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> column_names;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

/// Builds and validates a Dataset.
///
/// When `intercept` is set and no column of `X_raw` is identically one, an
/// all-ones column named "intercept" is prepended. Throws DataError on a
/// shape mismatch, non-finite entries, n < p + 1, or a design whose
/// smallest/largest singular value ratio is at most 1e-10; the rank message
/// names the columns involved in the near-null direction.
Dataset build_dataset(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_raw,
                      bool intercept, std::vector<std::string> names);

/// Per-column affine map onto [-1, 1]. Constant columns are excluded.
struct ColumnScaling {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<bool> excluded;

  Eigen::Index columns() const { return lo.size(); }
  Eigen::Index active_columns() const;

  // Out-of-sample values are clamped to [-limit, limit].
  double scale(Eigen::Index col, double x, double limit = 1.05) const;
  double unscale(Eigen::Index col, double s) const;
};

inline constexpr double kOutOfSampleClamp = 1.05;

ColumnScaling fit_scaling(const Dataset& d);

// (max - min) <= 1e-12 * max(1, |max|)
bool is_constant_range(double lo, double hi);

}  // namespace gals
