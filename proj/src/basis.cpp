#include "gals/basis.hpp"

#include "gals/errors.hpp"

#include <stdexcept>

namespace gals {

std::string_view to_string(BasisFamily f) {
  switch (f) {
    case BasisFamily::chebyshev: return "chebyshev";
    case BasisFamily::power: return "power";
  }
  return "unknown";
}

BasisFamily parse_basis_family(std::string_view s) {
  if (s == "chebyshev") return BasisFamily::chebyshev;
  if (s == "power") return BasisFamily::power;
  throw std::invalid_argument("unknown basis family '" + std::string(s) + "'");
}

Eigen::Index BasisSpec::dimension() const {
  return (include_constant ? 1 : 0) + degree * scaling.active_columns();
}

BasisSpec make_basis_spec(const Dataset& d, BasisOptions options) {
  if (options.degree < 1) throw std::invalid_argument("basis degree must be at least 1");
  BasisSpec spec;
  spec.family = options.family;
  spec.degree = options.degree;
  spec.scaling = fit_scaling(d);
  return spec;
}

void chebyshev_values(double x, Eigen::Ref<Eigen::VectorXd> out) {
  if (out.size() == 0) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (Eigen::Index k = 2; k < out.size(); ++k) out[k] = 2.0 * x * out[k - 1] - out[k - 2];
}

BasisMatrix evaluate_basis(const BasisSpec& spec, const Eigen::MatrixXd& X) {
  const ColumnScaling& sc = spec.scaling;
  if (X.cols() != sc.columns()) {
    throw DataError("basis scaling was fitted on " + std::to_string(sc.columns()) +
                    " columns, data has " + std::to_string(X.cols()));
  }
  const Eigen::Index n = X.rows();
  const int K = spec.degree;
  BasisMatrix out;
  out.P.resize(n, spec.dimension());
  Eigen::Index col = 0;
  if (spec.include_constant) out.P.col(col++).setOnes();

  Eigen::VectorXd t(K + 1);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (sc.excluded[j]) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = sc.scale(j, X(i, j), kOutOfSampleClamp);
      if (spec.family == BasisFamily::chebyshev) {
        chebyshev_values(s, t);
        for (int k = 1; k <= K; ++k) out.P(i, col + k - 1) = t[k];
      } else {
        double v = 1.0;
        for (int k = 1; k <= K; ++k) {
          v *= s;
          out.P(i, col + k - 1) = v;
        }
      }
    }
    col += K;
  }
  return out;
}

BasisMatrix evaluate_basis(const BasisSpec& spec, const Dataset& d) {
  return evaluate_basis(spec, d.X);
}

}  // namespace gals
