#include "qsr/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qsr::linalg {

HermitianEig eigh(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(h));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix hermitize(const Matrix& h) { return 0.5 * (h + h.adjoint()); }

Matrix sqrt_psd(const Matrix& h) {
  return spectral_apply(eigh(h), [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

Matrix inv_sqrt_psd(const Matrix& h) {
  return spectral_apply(eigh(h), [](double x) { return x > kRankTol ? 1.0 / std::sqrt(x) : 0.0; });
}

Matrix support_projector(const Matrix& h) {
  return spectral_apply(eigh(h), [](double x) { return x > kRankTol ? 1.0 : 0.0; });
}

Matrix support_basis(const Matrix& h) {
  const auto e = eigh(h);
  Index r = 0;
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) > kRankTol) ++r;
  // eigenvalues ascend, so the support is the trailing block; flip to put the
  // dominant direction first
  Matrix basis(h.rows(), r);
  for (Index k = 0; k < r; ++k) basis.col(k) = e.vectors.col(h.rows() - 1 - k);
  return basis;
}

Index numerical_rank(const Matrix& h) {
  const auto e = eigh(h);
  return (e.values.array() > kRankTol).count();
}

double trace_norm(const Matrix& m) {
  if (m.rows() == m.cols() && hermiticity_defect(m) <= 1e-13 * (1.0 + m.norm())) {
    return eigh(m).values.cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double lambda_max(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  return eigh(h).values.maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace qsr::linalg
