#pragma once

// Exact reference model: the full (N+1)-qubit pure state evolved under the
// diagonal spin-star Hamiltonian by per-amplitude phase multiplication.
// Qubit 0 is environment spin 1 (most significant index bit), qubit N is the
// system. Bit value 0 means |up>.

#include "qdarwin/linalg.hpp"
#include "qdarwin/observables.hpp"
#include "qdarwin/qfi.hpp"
#include "qdarwin/spinstar.hpp"

namespace qdarwin::oracle {

inline constexpr int kMaxQubits = 13;
inline constexpr double kDerivativeStep = 1e-6;

struct PureState {
  int n_qubits = 0;
  linalg::ComplexVector amplitudes;
};

PureState build_initial(double theta, int n_env);

PureState evolve(const PureState& state, double time, const CouplingSet& couplings);

linalg::ComplexMatrix oracle_fragment_state(double theta, double time,
                                            const CouplingSet& couplings, int fragment_size);

linalg::ComplexMatrix oracle_system_state(double theta, double time, const CouplingSet& couplings);

/// Central finite difference in theta, step kDerivativeStep.
linalg::ComplexMatrix oracle_fragment_derivative(double theta, double time,
                                                 const CouplingSet& couplings, int fragment_size);

QfiResult oracle_qfi(double theta, double time, const CouplingSet& couplings, int fragment_size);

/// Tr[A_q rho] and Tr[A_q^2 rho] from explicitly built 2^|F| matrices.
AqMoments oracle_observable_moments(double theta, double time, const CouplingSet& couplings,
                                    int fragment_size, const ObservableSpec& spec);

/// sum_i sigma_k^i on `n_spins` qubits, k in {'x', 'y', 'z'}.
linalg::ComplexMatrix collective_pauli(char axis, int n_spins);

}  // namespace qdarwin::oracle
