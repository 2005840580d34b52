#pragma once

#include "gals/design_matrix.hpp"
#include "gals/variance_model.hpp"

#include <Eigen/Dense>

namespace gals {

/// Outcome of the partitioned inverse of a 2p x 2p moment covariance.
struct BlockInverse {
  Eigen::MatrixXd W;
  bool degenerate = false;
  double cond_omega = 0.0;    // lambda_max / lambda_min of the input; +inf if singular
  double ridge_lambda = 0.0;  // 0 when no regularization was needed
};

/// Stacked OLS and WLS moment system:
///   g(b) = [ (1/n) sum X_i (y_i - X_i'b) ; (1/n) sum X_i (y_i - X_i'b) / sigma2_i ]
///        = m_y - G b.
struct MomentSystem {
  Eigen::MatrixXd G_hat;      // 2p x p
  Eigen::VectorXd m_y;        // 2p
  Eigen::MatrixXd Omega_hat;  // 2p x 2p
  Eigen::MatrixXd W;          // 2p x 2p
  Eigen::VectorXd inv_sigma2; // diagonal of D
  Eigen::Index n = 0;
  bool degenerate = false;
  double cond_omega = 0.0;
  double ridge_lambda = 0.0;

  Eigen::Index p() const { return G_hat.cols(); }
};

/// Feasible moment covariance with blocks
///   (1/n) sum e^2 XX',  (1/n) sum e^2/s2 XX',  (1/n) sum e^2/s2^2 XX'.
Eigen::MatrixXd estimate_omega(const Dataset& d, const Eigen::VectorXd& residuals,
                               const VarianceModel& vm);
Eigen::MatrixXd estimate_omega(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                               const Eigen::VectorXd& sigma2);

/// Inverts a symmetric 2p x 2p matrix through Omega_11^{-1} and the Schur
/// complement S = Omega_22 - Omega_21 Omega_11^{-1} Omega_12.
///
/// A block whose eigenvalue ratio against the whole matrix is below 1e-12
/// triggers a ridge of 1e-10 * trace / (2p) on the diagonal. A block that is
/// singular to working precision (ratio below 64 eps) cannot be rescued and
/// the result is flagged degenerate. Never throws.
BlockInverse invert_block(const Eigen::MatrixXd& Omega);

/// Assembles G, m_y, Omega and its inverse. Degenerate when the inverse is, or
/// when the variance model is flat. Throws NumericalError if rank(G) < p.
MomentSystem build_moment_system(const Dataset& d, const Eigen::VectorXd& residuals,
                                 const VarianceModel& vm);

/// beta = (G'WG)^{-1} G'W m_y. Throws NumericalError for a degenerate system
/// or a singular G'WG.
Eigen::VectorXd solve_gals(const MomentSystem& ms);

struct AnReference {
  Eigen::MatrixXd A_n;
  Eigen::VectorXd beta_hat;
};

inline constexpr Eigen::Index kAnReferenceMaxRows = 500;

/// Test oracle: the literal n x n weighting matrix
///   A_n = (1/n)(X'W11X + X'W12XD + DX'W21X + DX'W22XD),  X stored p x n,
/// and beta = (X A_n X')^{-1} X A_n Y. Refuses n > 500.
AnReference build_an_reference(const Dataset& d, const MomentSystem& ms);

}  // namespace gals
