#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qsr {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenvalues below this are treated as zero in square roots, inverses and ranks.
inline constexpr double kRankTol = 1e-10;

/// Eigenvalues in [-kPositivityTol, 0) are accepted and clipped on construction.
inline constexpr double kPositivityTol = 1e-9;

namespace linalg {

struct HermitianEig {
  RealVector values;  // ascending
  Matrix vectors;
};

HermitianEig eigh(const Matrix& h);

/// (H + H^dagger) / 2
Matrix hermitize(const Matrix& h);

/// f applied to the spectrum of a Hermitian matrix.
template <class F>
Matrix spectral_apply(const HermitianEig& e, F&& f) {
  RealVector fv(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i) fv(i) = f(e.values(i));
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

/// Square root of a PSD matrix; negative eigenvalues are clipped to zero.
Matrix sqrt_psd(const Matrix& h);

/// Pseudo-inverse square root; eigenvalues below kRankTol map to zero.
Matrix inv_sqrt_psd(const Matrix& h);

/// Orthogonal projector onto eigenvectors with eigenvalue above kRankTol.
Matrix support_projector(const Matrix& h);

/// Orthonormal basis (columns) of the support of a PSD matrix.
Matrix support_basis(const Matrix& h);

Index numerical_rank(const Matrix& h);

/// Schatten-1 norm. Uses the spectrum when the argument is Hermitian.
double trace_norm(const Matrix& m);

/// Largest eigenvalue of a Hermitian matrix.
double lambda_max(const Matrix& h);

double hermiticity_defect(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace linalg
}  // namespace qsr
