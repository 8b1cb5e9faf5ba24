#pragma once

#include <string_view>

#include "qdarwin/linalg.hpp"
#include "qdarwin/spinstar.hpp"

namespace qdarwin {

enum class QfiMethod { closed_form, thermodynamic, generic, oracle };

std::string_view to_string(QfiMethod method);

struct QfiResult {
  double value = 0.0;
  QfiMethod method = QfiMethod::closed_form;
};

/// Upper bound on any fragment QFI: the (constant) QFI of the system itself.
inline constexpr double kMaxQfi = 4.0;

/// tau_y is +infinity when sin(2 theta) <J> = 0.
struct TimescaleSet {
  double tau_d = 0.0;
  double tau_f = 0.0;
  double tau_y = 0.0;
};

/// Symmetric logarithmic derivative of the rank-2 fragment state.
struct SldDecomposition {
  linalg::ComplexVector phi;       // |phi_t>
  linalg::ComplexVector phi_perp;  // completes |phi_-t> to an orthonormal pair with |phi_t>
  linalg::ComplexMatrix matrix_2x2;
  linalg::ComplexMatrix full;
};

/// 4 [1 - prod_{k <= |F|} cos^2(2 J_k t / sqrt N)]; zero for an empty fragment.
QfiResult qfi_closed_form(const ModelPoint& point);

/// 4 [1 - exp(-(t / tau_F)^2)], tau_F = 1 / (2 sqrt(f <J^2>)).
QfiResult qfi_thermodynamic(double time, double f, double j2);

/// Spectral QFI 2 sum |<i|drho|j>|^2 / (l_i + l_j) over pairs with l_i + l_j > 1e-12.
///
/// Rejects inputs that are not density matrices (Hermitian, unit trace, no
/// eigenvalue below -1e-8) or whose derivative is not Hermitian and traceless,
/// all within 1e-8.
QfiResult qfi_generic(const linalg::ComplexMatrix& rho, const linalg::ComplexMatrix& drho);

inline constexpr double kSupportCutoff = 1e-12;

TimescaleSet timescales(double theta, double f, const EnsembleMoments& moments);

SldDecomposition sld(const ModelPoint& point);

/// X = theta + L / F, the locally unbiased optimal estimator observable.
linalg::ComplexMatrix optimal_observable(const ModelPoint& point);

/// QFI of the 2x2 system state; constant 4 for theta in (0, pi/2).
QfiResult system_qfi(double theta, double time, const CouplingSet& couplings);

}  // namespace qdarwin
