#pragma once

#include "gals/design_matrix.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace gals {

enum class BasisFamily { chebyshev, power };

std::string_view to_string(BasisFamily f);
BasisFamily parse_basis_family(std::string_view s);  // throws std::invalid_argument

/// Family and per-regressor degree, before any data is seen.
struct BasisOptions {
  BasisFamily family = BasisFamily::chebyshev;
  int degree = 2;
};

/// Approximating functions for the log-variance model: a constant plus
/// T_1..T_K (or x^1..x^K) of every non-constant scaled regressor. No
/// interaction terms.
struct BasisSpec {
  BasisFamily family = BasisFamily::chebyshev;
  int degree = 2;
  bool include_constant = true;
  ColumnScaling scaling;

  Eigen::Index dimension() const;
};

/// Checks the degree and fits the scaling on `d`.
BasisSpec make_basis_spec(const Dataset& d, BasisOptions options);

/// n x m evaluation matrix, P(i, k) = p_k(X_i). Column 0 is the constant.
struct BasisMatrix {
  Eigen::MatrixXd P;

  Eigen::Index rows() const { return P.rows(); }
  Eigen::Index cols() const { return P.cols(); }
};

/// Throws DataError when the scaling was fitted on a different column layout.
BasisMatrix evaluate_basis(const BasisSpec& spec, const Dataset& d);
BasisMatrix evaluate_basis(const BasisSpec& spec, const Eigen::MatrixXd& X);

/// Writes T_0(x)..T_{out.size()-1}(x) by the three-term recurrence.
void chebyshev_values(double x, Eigen::Ref<Eigen::VectorXd> out);

}  // namespace gals
