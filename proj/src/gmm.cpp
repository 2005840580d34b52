#include "gals/gmm.hpp"

#include "gals/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gals {

namespace {

constexpr double kRcondTrigger = 1e-12;
constexpr double kRidgeScale = 1e-10;
// Below this the block is singular to working precision; a ridge would only
// invent the missing direction.
constexpr double kRcondHopeless = 64.0 * std::numeric_limits<double>::epsilon();
constexpr double kSolveRcond = 1e-14;

struct SymEig {
  double min;
  double max;
};

SymEig eigen_range(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev[0], ev[ev.size() - 1]};
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M) { return 0.5 * (M + M.transpose()); }

struct Attempt {
  Eigen::MatrixXd W;
  double rcond = 0.0;  // worst block eigenvalue ratio, equilibrated
};

// Partitioned inverse of a symmetric matrix:
//   W11 = A^-1 + A^-1 B S^-1 B' A^-1,  W12 = -A^-1 B S^-1,  W22 = S^-1,
//   S = C - B' A^-1 B.
// Computed on D^-1/2 M D^-1/2 (D = diag M) so that the OLS and WLS moment
// blocks, whose scales differ by roughly sigma^4, are judged on equal terms.
Attempt partitioned_inverse(const Eigen::MatrixXd& M) {
  const Eigen::Index p = M.rows() / 2;
  Attempt out;
  const Eigen::VectorXd diag = M.diagonal();
  if (!(diag.minCoeff() > 0.0)) return out;
  const Eigen::VectorXd s = diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd E = symmetrize(s.asDiagonal() * M * s.asDiagonal());
  const double scale = eigen_range(E).max;

  const Eigen::MatrixXd A = E.topLeftCorner(p, p);
  const Eigen::MatrixXd B = E.topRightCorner(p, p);
  const Eigen::MatrixXd C = E.bottomRightCorner(p, p);

  const double rcond_a = eigen_range(A).min / scale;
  if (!(rcond_a >= kRcondTrigger)) {
    out.rcond = rcond_a;
    return out;
  }
  Eigen::LDLT<Eigen::MatrixXd> a_fact(A);
  const Eigen::MatrixXd a_inv_b = a_fact.solve(B);
  const Eigen::MatrixXd S = symmetrize(C - B.transpose() * a_inv_b);
  const double rcond_s = eigen_range(S).min / scale;
  out.rcond = std::min(rcond_a, rcond_s);
  if (!(rcond_s >= kRcondTrigger)) return out;

  const Eigen::MatrixXd a_inv = a_fact.solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd s_inv =
      symmetrize(Eigen::LDLT<Eigen::MatrixXd>(S).solve(Eigen::MatrixXd::Identity(p, p)));
  const Eigen::MatrixXd w12 = -a_inv_b * s_inv;

  Eigen::MatrixXd We(2 * p, 2 * p);
  We.topLeftCorner(p, p) = symmetrize(a_inv + a_inv_b * s_inv * a_inv_b.transpose());
  We.topRightCorner(p, p) = w12;
  We.bottomLeftCorner(p, p) = w12.transpose();
  We.bottomRightCorner(p, p) = s_inv;
  out.W = symmetrize(s.asDiagonal() * We * s.asDiagonal());
  return out;
}

}  // namespace

Eigen::MatrixXd estimate_omega(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                               const Eigen::VectorXd& sigma2) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (residuals.size() != n || sigma2.size() != n) {
    throw DataError("residual and variance vectors must have one entry per observation");
  }
  const Eigen::ArrayXd e2 = residuals.array().square();
  const Eigen::ArrayXd inv = sigma2.array().inverse();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd omega(2 * p, 2 * p);
  const Eigen::MatrixXd o11 = inv_n * X.transpose() * (e2.matrix().asDiagonal() * X);
  const Eigen::MatrixXd o12 = inv_n * X.transpose() * ((e2 * inv).matrix().asDiagonal() * X);
  const Eigen::MatrixXd o22 =
      inv_n * X.transpose() * ((e2 * inv * inv).matrix().asDiagonal() * X);
  omega.topLeftCorner(p, p) = symmetrize(o11);
  omega.topRightCorner(p, p) = symmetrize(o12);
  omega.bottomLeftCorner(p, p) = omega.topRightCorner(p, p).transpose();
  omega.bottomRightCorner(p, p) = symmetrize(o22);
  return omega;
}

Eigen::MatrixXd estimate_omega(const Dataset& d, const Eigen::VectorXd& residuals,
                               const VarianceModel& vm) {
  return estimate_omega(d.X, residuals, vm.sigma2);
}

BlockInverse invert_block(const Eigen::MatrixXd& Omega) {
  BlockInverse out;
  const Eigen::Index dim = Omega.rows();
  if (dim == 0 || dim % 2 != 0 || Omega.cols() != dim || !Omega.allFinite()) {
    out.degenerate = true;
    out.cond_omega = std::numeric_limits<double>::infinity();
    return out;
  }
  const Eigen::MatrixXd sym = symmetrize(Omega);
  const SymEig range = eigen_range(sym);
  out.cond_omega =
      range.min > 0.0 ? range.max / range.min : std::numeric_limits<double>::infinity();
  if (!(range.max > 0.0)) {
    out.degenerate = true;
    out.W = Eigen::MatrixXd::Zero(dim, dim);
    return out;
  }

  Attempt first = partitioned_inverse(sym);
  if (first.rcond >= kRcondTrigger) {
    out.W = std::move(first.W);
    return out;
  }
  if (!(first.rcond >= kRcondHopeless)) {
    out.degenerate = true;
    out.W = Eigen::MatrixXd::Zero(dim, dim);
    return out;
  }

  const double lambda = kRidgeScale * sym.trace() / static_cast<double>(dim);
  const Eigen::MatrixXd ridged = sym + lambda * Eigen::MatrixXd::Identity(dim, dim);
  Attempt second = partitioned_inverse(ridged);
  out.ridge_lambda = lambda;
  if (second.rcond >= kRcondTrigger) {
    out.W = std::move(second.W);
  } else {
    out.degenerate = true;
    out.W = Eigen::MatrixXd::Zero(dim, dim);
  }
  return out;
}

MomentSystem build_moment_system(const Dataset& d, const Eigen::VectorXd& residuals,
                                 const VarianceModel& vm) {
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  if (vm.sigma2.size() != n || residuals.size() != n) {
    throw DataError("variance model and residuals must match the dataset");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::MatrixXd DX = vm.inv_sigma2.asDiagonal() * d.X;

  MomentSystem ms;
  ms.n = n;
  ms.inv_sigma2 = vm.inv_sigma2;
  ms.G_hat.resize(2 * p, p);
  ms.G_hat.topRows(p) = symmetrize(inv_n * d.X.transpose() * d.X);
  ms.G_hat.bottomRows(p) = symmetrize(inv_n * d.X.transpose() * DX);
  ms.m_y.resize(2 * p);
  ms.m_y.head(p) = inv_n * d.X.transpose() * d.y;
  ms.m_y.tail(p) = inv_n * DX.transpose() * d.y;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ms.G_hat);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[p - 1] / sv[0] <= 1e-10) {
    throw NumericalError("moment Jacobian G does not have full column rank");
  }

  ms.Omega_hat = estimate_omega(d.X, residuals, vm.sigma2);
  BlockInverse inv = invert_block(ms.Omega_hat);
  ms.W = std::move(inv.W);
  ms.cond_omega = inv.cond_omega;
  ms.ridge_lambda = inv.ridge_lambda;
  ms.degenerate = inv.degenerate || vm.homoscedastic_flag;
  return ms;
}

Eigen::VectorXd solve_gals(const MomentSystem& ms) {
  if (ms.degenerate) throw NumericalError("moment system is degenerate; GALS is undefined");
  const Eigen::MatrixXd GtW = ms.G_hat.transpose() * ms.W;
  const Eigen::MatrixXd H = symmetrize(GtW * ms.G_hat);
  const SymEig range = eigen_range(H);
  if (!(range.min > kSolveRcond * range.max)) {
    std::ostringstream os;
    os << "G'WG is singular (eigenvalue range " << range.min << " .. " << range.max << ")";
    throw NumericalError(os.str());
  }
  return Eigen::LDLT<Eigen::MatrixXd>(H).solve(GtW * ms.m_y);
}

AnReference build_an_reference(const Dataset& d, const MomentSystem& ms) {
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  if (n > kAnReferenceMaxRows) {
    throw std::invalid_argument("A_n reference is limited to " +
                                std::to_string(kAnReferenceMaxRows) + " observations");
  }
  if (ms.degenerate) throw NumericalError("moment system is degenerate");

  const Eigen::MatrixXd Xt = d.X.transpose();  // p x n
  const Eigen::MatrixXd D = ms.inv_sigma2.asDiagonal();
  const Eigen::MatrixXd W11 = ms.W.topLeftCorner(p, p);
  const Eigen::MatrixXd W12 = ms.W.topRightCorner(p, p);
  const Eigen::MatrixXd W21 = ms.W.bottomLeftCorner(p, p);
  const Eigen::MatrixXd W22 = ms.W.bottomRightCorner(p, p);

  AnReference out;
  out.A_n = (Xt.transpose() * W11 * Xt + Xt.transpose() * W12 * Xt * D +
             D * Xt.transpose() * W21 * Xt + D * Xt.transpose() * W22 * Xt * D) /
            static_cast<double>(n);
  const Eigen::MatrixXd lhs = Xt * out.A_n * Xt.transpose();
  const Eigen::VectorXd rhs = Xt * out.A_n * d.y;
  out.beta_hat = lhs.fullPivLu().solve(rhs);
  return out;
}

}  // namespace gals
