#pragma once

// Spin-star model: a central qubit coupled through sigma_z sigma_z terms to N
// environment qubits, H = sum_m J_m / sqrt(N) sigma_z^m sigma_z^S.
//
// Basis convention used everywhere: |up> = (1, 0)^T, |down> = (0, 1)^T.
// The system starts in cos(theta)|down> + i sin(theta)|up>, every environment
// spin in |+>. Fragments are always the leading environment spins.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "qdarwin/linalg.hpp"

namespace qdarwin {

/// Ensemble moments <J> and <J^2> used by the thermodynamic-limit formulas.
struct EnsembleMoments {
  double mean = 0.0;
  double second_moment = 0.0;
};

struct GaussianCouplingSpec {
  double mean = 0.0;
  double stddev = 0.0;

  EnsembleMoments moments() const { return {mean, mean * mean + stddev * stddev}; }
};

/// One realization J_1..J_N plus the ensemble moments it was drawn from.
class CouplingSet {
 public:
  CouplingSet(std::vector<double> values, EnsembleMoments moments);

  /// Uses the sample moments of `values` as the ensemble moments.
  static CouplingSet from_values(std::vector<double> values);

  int n_env() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  double operator[](int m) const { return values_[static_cast<std::size_t>(m)]; }
  const EnsembleMoments& moments() const { return moments_; }

 private:
  std::vector<double> values_;
  EnsembleMoments moments_;
};

/// Deterministic per (spec, n_env, seed) and per build.
CouplingSet sample_couplings(const GaussianCouplingSpec& spec, int n_env, std::uint64_t seed);

/// Counter-based seed for realization `index` of a run seeded with `master_seed`.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// Maps any angle onto [0, pi/2]; fragment quantities depend on theta only via cos^2(theta).
double reduce_theta(double theta);

/// sin(2 theta), exactly zero at theta = 0 and theta = pi/2.
double sin_2theta(double theta);

struct ModelPoint {
  double theta = 0.0;
  double time = 0.0;
  CouplingSet couplings;
  int fragment_size = 0;

  /// Validates 0 <= fragment_size <= N and time >= 0; theta is reduced to [0, pi/2].
  static ModelPoint make(double theta, double time, CouplingSet couplings, int fragment_size);

  double fraction() const { return static_cast<double>(fragment_size) / couplings.n_env(); }
};

struct FragmentState {
  linalg::ComplexMatrix rho;
  linalg::ComplexMatrix drho_dtheta;
};

/// Single-spin branch state Omega_m(+-t).
linalg::ComplexMatrix omega(double j, double time, int n_env, int sign);

/// 2x2 reduced system state.
linalg::ComplexMatrix system_state(double theta, double time, const CouplingSet& couplings);
linalg::ComplexMatrix system_state_derivative(double theta, double time,
                                              const CouplingSet& couplings);

/// e^{-Gamma(t)} = prod_k cos(2 J_k t / sqrt(N)); may be negative at finite N.
double coherence_factor(double time, const CouplingSet& couplings);

/// Gamma(t) = -ln(coherence_factor); empty when the product is not positive.
std::optional<double> decoherence_exponent(double time, const CouplingSet& couplings);

/// Thermodynamic Gamma(t) = (t / tau_D)^2 with tau_D = 1 / sqrt(2 <J^2>).
double gamma_thermodynamic(double time, double j2);

FragmentState fragment_state(const ModelPoint& point);

/// Branch state |phi_{sign t}> on the first `fragment_size` environment spins.
linalg::ComplexVector branch_state(double time, const CouplingSet& couplings, int fragment_size,
                                   int sign);

/// c(t) = <phi_t|phi_-t> = prod_{m <= |F|} cos(2 J_m t / sqrt(N)).
double overlap_c(double time, const CouplingSet& couplings, int fragment_size);

/// Relative phase 2 J t / sqrt(N) picked up by one environment spin between the branches.
inline double branch_phase(double j, double time, int n_env) {
  return 2.0 * j * time / std::sqrt(static_cast<double>(n_env));
}

}  // namespace qdarwin
