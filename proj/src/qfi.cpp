#include "qdarwin/qfi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdarwin/errors.hpp"

namespace qdarwin {

using linalg::ComplexMatrix;
using linalg::ComplexVector;

namespace {

constexpr double kStateTolerance = 1e-8;

void validate_density(const ComplexMatrix& rho, const ComplexMatrix& drho) {
  if (rho.rows() != rho.cols() || rho.size() == 0) {
    throw DimensionError("qfi_generic: rho not square", static_cast<std::size_t>(rho.rows()),
                         static_cast<std::size_t>(rho.cols()));
  }
  if (drho.rows() != rho.rows() || drho.cols() != rho.cols()) {
    throw DimensionError("qfi_generic: drho shape", static_cast<std::size_t>(rho.rows()),
                         static_cast<std::size_t>(drho.rows()));
  }
  if (!linalg::all_finite(rho)) throw InvalidStateError("rho entries finite", std::numeric_limits<double>::quiet_NaN());
  if (!linalg::all_finite(drho)) throw InvalidStateError("drho entries finite", std::numeric_limits<double>::quiet_NaN());

  if (const double r = linalg::hermiticity_residual(rho); r > kStateTolerance) {
    throw InvalidStateError("rho Hermitian", r);
  }
  if (const double tr = rho.trace().real(); std::abs(tr - 1.0) > kStateTolerance) {
    throw InvalidStateError("trace(rho) = 1", tr);
  }
  if (const double r = linalg::hermiticity_residual(drho); r > kStateTolerance) {
    throw InvalidStateError("drho Hermitian", r);
  }
  if (const double tr = std::abs(drho.trace()); tr > kStateTolerance) {
    throw InvalidStateError("trace(drho) = 0", tr);
  }
}

}  // namespace

std::string_view to_string(QfiMethod method) {
  switch (method) {
    case QfiMethod::closed_form:
      return "closed_form";
    case QfiMethod::thermodynamic:
      return "thermodynamic";
    case QfiMethod::generic:
      return "generic";
    case QfiMethod::oracle:
      return "oracle";
  }
  return "unknown";
}

QfiResult qfi_closed_form(const ModelPoint& point) {
  if (point.fragment_size == 0) return {0.0, QfiMethod::closed_form};

  // 1 - prod cos^2 evaluated as -expm1(sum log cos^2) to keep relative accuracy at short times.
  const int n = point.couplings.n_env();
  double log_c2 = 0.0;
  for (int m = 0; m < point.fragment_size; ++m) {
    const double c = std::cos(branch_phase(point.couplings[m], point.time, n));
    if (c == 0.0) return {kMaxQfi, QfiMethod::closed_form};
    log_c2 += 2.0 * std::log(std::abs(c));
  }
  const double value = -kMaxQfi * std::expm1(log_c2);
  return {std::clamp(value, 0.0, kMaxQfi), QfiMethod::closed_form};
}

QfiResult qfi_thermodynamic(double time, double f, double j2) {
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("qfi_thermodynamic: f must lie in (0, 1]");
  if (!(j2 > 0.0)) throw DomainError("qfi_thermodynamic: <J^2> must be > 0");
  if (!(time >= 0.0)) throw DomainError("qfi_thermodynamic: time must be >= 0");
  // (t / tau_F)^2 = 4 f <J^2> t^2
  return {-kMaxQfi * std::expm1(-4.0 * f * j2 * time * time), QfiMethod::thermodynamic};
}

QfiResult qfi_generic(const ComplexMatrix& rho, const ComplexMatrix& drho) {
  validate_density(rho, drho);

  const auto eig = linalg::eig_hermitian(0.5 * (rho + rho.adjoint()));
  if (const double low = eig.eigenvalues.minCoeff(); low < -kStateTolerance) {
    throw InvalidStateError("rho positive semidefinite", low);
  }

  const ComplexMatrix d = eig.eigenvectors.adjoint() * drho * eig.eigenvectors;
  const auto& lambda = eig.eigenvalues;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
      const double denom = lambda(i) + lambda(j);
      if (denom > kSupportCutoff) sum += std::norm(d(i, j)) / denom;
    }
  }
  return {2.0 * sum, QfiMethod::generic};
}

TimescaleSet timescales(double theta, double f, const EnsembleMoments& moments) {
  if (!(f > 0.0)) throw DomainError("timescales: f must be > 0");
  if (!(moments.second_moment > 0.0)) throw DomainError("timescales: <J^2> must be > 0");

  TimescaleSet out;
  out.tau_d = 1.0 / std::sqrt(2.0 * moments.second_moment);
  out.tau_f = 1.0 / (2.0 * std::sqrt(f * moments.second_moment));
  const double rate = 2.0 * std::abs(sin_2theta(reduce_theta(theta)) * moments.mean) * std::sqrt(f);
  out.tau_y = rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
  return out;
}

SldDecomposition sld(const ModelPoint& point) {
  if (point.fragment_size == 0) throw EmptyFragmentError();
  const double theta = point.theta;
  if (sin_2theta(theta) == 0.0) {
    throw SingularPointError("sld: theta must lie strictly inside (0, pi/2)");
  }

  const double c = overlap_c(point.time, point.couplings, point.fragment_size);
  const double c2 = c * c;
  const double s = std::sqrt(std::max(0.0, 1.0 - c2));

  SldDecomposition out;
  out.phi = branch_state(point.time, point.couplings, point.fragment_size, +1);
  const ComplexVector back = branch_state(point.time, point.couplings, point.fragment_size, -1);
  ComplexVector perp = back - c * out.phi;
  if (perp.norm() < 1e-9) {
    // Parallel branches: the off-diagonal SLD entries vanish, so any unit vector
    // orthogonal to |phi_t> completes the basis. Take the computational basis
    // vector with the smallest overlap.
    Eigen::Index k = 0;
    out.phi.cwiseAbs().minCoeff(&k);
    perp = ComplexVector::Unit(out.phi.size(), k);
    perp -= out.phi.dot(perp) * out.phi;
  }
  out.phi_perp = perp.normalized();

  const double tan_t = std::tan(theta);
  out.matrix_2x2.resize(2, 2);
  const double off = 2.0 * c * s * tan_t;
  out.matrix_2x2 << 2.0 * (c2 - 1.0) * tan_t, off, off,
      (1.0 - c2 + (1.0 + c2) * std::cos(2.0 * theta)) / (std::sin(theta) * std::cos(theta));

  ComplexMatrix basis(out.phi.size(), 2);
  basis.col(0) = out.phi;
  basis.col(1) = out.phi_perp;
  out.full = basis * out.matrix_2x2 * basis.adjoint();
  return out;
}

ComplexMatrix optimal_observable(const ModelPoint& point) {
  const double info = qfi_closed_form(point).value;
  if (!(info > 0.0)) {
    throw SingularPointError("optimal_observable: QFI is zero, no information at this point");
  }
  const SldDecomposition l = sld(point);
  const auto dim = l.full.rows();
  return point.theta * ComplexMatrix::Identity(dim, dim) + l.full / info;
}

QfiResult system_qfi(double theta, double time, const CouplingSet& couplings) {
  const QfiResult r = qfi_generic(system_state(theta, time, couplings),
                                  system_state_derivative(theta, time, couplings));
  return {r.value, QfiMethod::generic};
}

}  // namespace qdarwin
