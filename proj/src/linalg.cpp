#include "qdarwin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qdarwin/errors.hpp"

namespace qdarwin::linalg {

namespace {

// Splits the factor list into kept and traced parts and tabulates the
// computational index of every (kept, traced) pair.
struct FactorSplit {
  Eigen::Index kept_dim = 1;
  Eigen::Index traced_dim = 1;
  std::vector<Eigen::Index> full_index;  // kept-major: full_index[k * traced_dim + r]

  Eigen::Index at(Eigen::Index k, Eigen::Index r) const {
    return full_index[static_cast<std::size_t>(k * traced_dim + r)];
  }
};

FactorSplit split_factors(std::span<const int> dims, std::span<const int> keep,
                          Eigen::Index actual_dim) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 1) throw DomainError("partial_trace: factor dimensions must be positive");
    total *= static_cast<std::size_t>(d);
  }
  if (total != static_cast<std::size_t>(actual_dim)) {
    throw DimensionError("partial_trace", total, static_cast<std::size_t>(actual_dim));
  }

  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) {
    if (k < 0 || static_cast<std::size_t>(k) >= dims.size()) {
      throw DomainError("partial_trace: keep index " + std::to_string(k) + " out of range");
    }
    if (kept[static_cast<std::size_t>(k)]) {
      throw DomainError("partial_trace: duplicate keep index " + std::to_string(k));
    }
    kept[static_cast<std::size_t>(k)] = true;
  }

  FactorSplit split;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    (kept[f] ? split.kept_dim : split.traced_dim) *= dims[f];
  }
  split.full_index.resize(total);

  std::vector<int> digit(dims.size(), 0);
  for (Eigen::Index i = 0; i < actual_dim; ++i) {
    Eigen::Index k = 0;
    Eigen::Index r = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (kept[f]) {
        k = k * dims[f] + digit[f];
      } else {
        r = r * dims[f] + digit[f];
      }
    }
    split.full_index[static_cast<std::size_t>(k * split.traced_dim + r)] = i;
    // odometer increment, last factor fastest
    for (std::size_t f = dims.size(); f-- > 0;) {
      if (++digit[f] < dims[f]) break;
      digit[f] = 0;
    }
  }
  return split;
}

}  // namespace

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix vectorize(const ComplexMatrix& a) {
  // Eigen storage is column-major, so the raw buffer is already column-stacked.
  return ComplexMatrix(Eigen::Map<const ComplexVector>(a.data(), a.size()));
}

ComplexMatrix unvectorize(const ComplexMatrix& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.cols() != 1 || v.rows() != rows * cols) {
    throw DimensionError("unvectorize", static_cast<std::size_t>(rows * cols),
                         static_cast<std::size_t>(v.size()));
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const int> dims,
                            std::span<const int> keep) {
  if (rho.rows() != rho.cols()) {
    throw DimensionError("partial_trace: matrix not square", static_cast<std::size_t>(rho.rows()),
                         static_cast<std::size_t>(rho.cols()));
  }
  const FactorSplit split = split_factors(dims, keep, rho.rows());
  ComplexMatrix out = ComplexMatrix::Zero(split.kept_dim, split.kept_dim);
  for (Eigen::Index k = 0; k < split.kept_dim; ++k) {
    for (Eigen::Index kk = 0; kk < split.kept_dim; ++kk) {
      Complex acc = 0.0;
      for (Eigen::Index r = 0; r < split.traced_dim; ++r) {
        acc += rho(split.at(k, r), split.at(kk, r));
      }
      out(k, kk) = acc;
    }
  }
  return out;
}

ComplexMatrix partial_trace_pure(const ComplexVector& psi, std::span<const int> dims,
                                 std::span<const int> keep) {
  const FactorSplit split = split_factors(dims, keep, psi.size());
  ComplexMatrix m(split.kept_dim, split.traced_dim);
  for (Eigen::Index k = 0; k < split.kept_dim; ++k) {
    for (Eigen::Index r = 0; r < split.traced_dim; ++r) {
      m(k, r) = psi(split.at(k, r));
    }
  }
  return m * m.adjoint();
}

HermitianEigenSystem eig_hermitian(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("eig_hermitian: matrix not square", static_cast<std::size_t>(a.rows()),
                         static_cast<std::size_t>(a.cols()));
  }
  const double residual = hermiticity_residual(a);
  if (residual > kHermitianTolerance) throw NotHermitianError(residual);

  // Symmetrize so round-off asymmetry never leaks into the solver.
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const ComplexMatrix& a) {
  return max_abs(a - a.adjoint());
}

bool all_finite(const ComplexMatrix& a) {
  return a.allFinite();
}

}  // namespace qdarwin::linalg
