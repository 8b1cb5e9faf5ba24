#include "qdarwin/oracle.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "qdarwin/errors.hpp"

namespace qdarwin::oracle {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

namespace {

void check_size(int n_env) {
  if (n_env < 1) throw DomainError("oracle: n_env must be >= 1");
  if (n_env + 1 > kMaxQubits) {
    throw SizeCapError(static_cast<std::size_t>(n_env + 1), kMaxQubits);
  }
}

ComplexMatrix reduced_state(const PureState& state, std::vector<int> keep) {
  const std::vector<int> dims(static_cast<std::size_t>(state.n_qubits), 2);
  return linalg::partial_trace_pure(state.amplitudes, dims, keep);
}

std::vector<int> leading(int count) {
  std::vector<int> keep(static_cast<std::size_t>(count));
  std::iota(keep.begin(), keep.end(), 0);
  return keep;
}

ComplexMatrix pauli(char axis) {
  ComplexMatrix p(2, 2);
  switch (axis) {
    case 'x':
      p << 0.0, 1.0, 1.0, 0.0;
      break;
    case 'y':
      p << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
      break;
    case 'z':
      p << 1.0, 0.0, 0.0, -1.0;
      break;
    default:
      throw DomainError(std::string("unknown Pauli axis '") + axis + "'");
  }
  return p;
}

}  // namespace

PureState build_initial(double theta, int n_env) {
  check_size(n_env);
  const int n_qubits = n_env + 1;
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  const double env_amp = std::pow(0.5, 0.5 * n_env);
  const Complex up(0.0, std::sin(theta));  // beta = i sin(theta)
  const Complex down(std::cos(theta), 0.0);

  PureState state{n_qubits, ComplexVector(dim)};
  for (Eigen::Index i = 0; i < dim; ++i) {
    state.amplitudes(i) = env_amp * ((i & 1) == 0 ? up : down);
  }
  return state;
}

PureState evolve(const PureState& state, double time, const CouplingSet& couplings) {
  const int n_env = state.n_qubits - 1;
  if (couplings.n_env() != n_env) {
    throw DimensionError("evolve: couplings vs environment size",
                         static_cast<std::size_t>(n_env),
                         static_cast<std::size_t>(couplings.n_env()));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_env));

  PureState out = state;
  const Eigen::Index dim = out.amplitudes.size();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double s = (i & 1) == 0 ? 1.0 : -1.0;
    double field = 0.0;
    for (int m = 0; m < n_env; ++m) {
      const bool down = (i >> (state.n_qubits - 1 - m)) & 1;
      field += down ? -couplings[m] : couplings[m];
    }
    out.amplitudes(i) *= std::polar(1.0, -time * s * field * scale);
  }
  return out;
}

ComplexMatrix oracle_fragment_state(double theta, double time, const CouplingSet& couplings,
                                    int fragment_size) {
  check_size(couplings.n_env());
  if (fragment_size < 0 || fragment_size > couplings.n_env()) {
    throw DomainError("oracle_fragment_state: fragment_size out of range");
  }
  const PureState psi = evolve(build_initial(theta, couplings.n_env()), time, couplings);
  return reduced_state(psi, leading(fragment_size));
}

ComplexMatrix oracle_system_state(double theta, double time, const CouplingSet& couplings) {
  const PureState psi = evolve(build_initial(theta, couplings.n_env()), time, couplings);
  return reduced_state(psi, {couplings.n_env()});
}

ComplexMatrix oracle_fragment_derivative(double theta, double time, const CouplingSet& couplings,
                                         int fragment_size) {
  const double h = kDerivativeStep;
  return (oracle_fragment_state(theta + h, time, couplings, fragment_size) -
          oracle_fragment_state(theta - h, time, couplings, fragment_size)) /
         (2.0 * h);
}

QfiResult oracle_qfi(double theta, double time, const CouplingSet& couplings, int fragment_size) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2)) {
    throw DomainError("oracle_qfi: theta must lie strictly inside (0, pi/2)");
  }
  if (fragment_size == 0) return {0.0, QfiMethod::oracle};
  const QfiResult r =
      qfi_generic(oracle_fragment_state(theta, time, couplings, fragment_size),
                  oracle_fragment_derivative(theta, time, couplings, fragment_size));
  return {r.value, QfiMethod::oracle};
}

AqMoments oracle_observable_moments(double theta, double time, const CouplingSet& couplings,
                                    int fragment_size, const ObservableSpec& spec) {
  if (fragment_size < 1) throw EmptyFragmentError();
  const ComplexMatrix rho = oracle_fragment_state(theta, time, couplings, fragment_size);
  const ComplexMatrix a = spec.q() * collective_pauli('x', fragment_size) +
                          (1.0 - spec.q()) * collective_pauli('y', fragment_size);
  return {(a * rho).trace().real(), (a * a * rho).trace().real()};
}

ComplexMatrix collective_pauli(char axis, int n_spins) {
  if (n_spins < 1) throw DomainError("collective_pauli: n_spins must be >= 1");
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix p = pauli(axis);
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (int site = 0; site < n_spins; ++site) {
    ComplexMatrix term = site == 0 ? p : id;
    for (int k = 1; k < n_spins; ++k) term = linalg::kron(term, k == site ? p : id);
    sum += term;
  }
  return sum;
}

}  // namespace qdarwin::oracle
