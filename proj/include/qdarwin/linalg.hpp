#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace qdarwin::linalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigenpairs of a Hermitian matrix; eigenvalues ascending, eigenvectors as columns.
struct HermitianEigenSystem {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

inline constexpr double kHermitianTolerance = 1e-10;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product of column vectors.
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

/// Column-stacking vectorization; returns a (rows*cols) x 1 matrix.
ComplexMatrix vectorize(const ComplexMatrix& a);
ComplexMatrix unvectorize(const ComplexMatrix& v, Eigen::Index rows, Eigen::Index cols);

/// Reduced matrix on the factors listed in `keep` (kept in their original order).
/// Factor 0 is the most significant in the computational index.
ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const int> dims,
                            std::span<const int> keep);

/// Same as partial_trace(|psi><psi|, dims, keep) without forming the projector.
ComplexMatrix partial_trace_pure(const ComplexVector& psi, std::span<const int> dims,
                                 std::span<const int> keep);

HermitianEigenSystem eig_hermitian(const ComplexMatrix& a);

double max_abs(const ComplexMatrix& a);
double hermiticity_residual(const ComplexMatrix& a);
bool all_finite(const ComplexMatrix& a);

}  // namespace qdarwin::linalg
