#include "qdarwin/spinstar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "qdarwin/errors.hpp"

namespace qdarwin {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_fragment_size(int fragment_size, int n_env) {
  if (fragment_size < 0 || fragment_size > n_env) {
    throw DomainError("fragment_size " + std::to_string(fragment_size) +
                      " outside [0, " + std::to_string(n_env) + "]");
  }
}

}  // namespace

CouplingSet::CouplingSet(std::vector<double> values, EnsembleMoments moments)
    : values_(std::move(values)), moments_(moments) {
  if (values_.empty()) throw DomainError("CouplingSet: n_env must be >= 1");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("CouplingSet: non-finite coupling");
  }
  const double var = moments_.second_moment - moments_.mean * moments_.mean;
  if (!(var >= -1e-12 * std::max(1.0, moments_.second_moment))) {
    throw DomainError("CouplingSet: inconsistent moments, <J^2> < <J>^2");
  }
}

CouplingSet CouplingSet::from_values(std::vector<double> values) {
  double sum = 0.0;
  double sum2 = 0.0;
  for (double v : values) {
    sum += v;
    sum2 += v * v;
  }
  const double n = values.empty() ? 1.0 : static_cast<double>(values.size());
  const double mean = sum / n;
  // max() guards the round-off case where the sample variance is a hair negative
  const double second = std::max(sum2 / n, mean * mean);
  return CouplingSet(std::move(values), {mean, second});
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0xD1B54A32D192ED03ULL));
}

CouplingSet sample_couplings(const GaussianCouplingSpec& spec, int n_env, std::uint64_t seed) {
  if (n_env < 1) throw DomainError("sample_couplings: n_env must be >= 1");
  if (!(spec.stddev >= 0.0)) throw DomainError("sample_couplings: stddev must be >= 0");

  std::vector<double> values(static_cast<std::size_t>(n_env), spec.mean);
  if (spec.stddev > 0.0) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(spec.mean, spec.stddev);
    for (double& v : values) v = normal(engine);
  }
  return CouplingSet(std::move(values), spec.moments());
}

double reduce_theta(double theta) {
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(theta, pi);
  if (r < 0.0) r += pi;
  if (r > pi / 2) r = pi - r;
  return r;
}

double sin_2theta(double theta) {
  if (theta == 0.0 || theta == std::numbers::pi / 2) return 0.0;
  return std::sin(2.0 * theta);
}

ModelPoint ModelPoint::make(double theta, double time, CouplingSet couplings,
                            int fragment_size) {
  if (!(time >= 0.0) || !std::isfinite(time)) throw DomainError("time must be finite and >= 0");
  check_fragment_size(fragment_size, couplings.n_env());
  return ModelPoint{reduce_theta(theta), time, std::move(couplings), fragment_size};
}

ComplexMatrix omega(double j, double time, int n_env, int sign) {
  if (n_env < 1) throw DomainError("omega: n_env must be >= 1");
  const Complex phase = std::polar(1.0, (sign >= 0 ? 1.0 : -1.0) * branch_phase(j, time, n_env));
  ComplexMatrix w(2, 2);
  w << 0.5, 0.5 * phase, 0.5 * std::conj(phase), 0.5;
  return w;
}

ComplexMatrix system_state(double theta, double time, const CouplingSet& couplings) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double decay = coherence_factor(time, couplings);
  const Complex off(0.0, s * c * decay);
  ComplexMatrix rho(2, 2);
  rho << s * s, off, std::conj(off), c * c;
  return rho;
}

ComplexMatrix system_state_derivative(double theta, double time, const CouplingSet& couplings) {
  const double decay = coherence_factor(time, couplings);
  const double s2 = std::sin(2.0 * theta);
  const Complex off(0.0, std::cos(2.0 * theta) * decay);
  ComplexMatrix d(2, 2);
  d << s2, off, std::conj(off), -s2;
  return d;
}

double coherence_factor(double time, const CouplingSet& couplings) {
  return overlap_c(time, couplings, couplings.n_env());
}

std::optional<double> decoherence_exponent(double time, const CouplingSet& couplings) {
  const double factor = coherence_factor(time, couplings);
  if (!(factor > 0.0)) return std::nullopt;
  return -std::log(factor);
}

double gamma_thermodynamic(double time, double j2) {
  if (!(j2 > 0.0)) throw DomainError("gamma_thermodynamic: <J^2> must be > 0");
  return 2.0 * j2 * time * time;
}

FragmentState fragment_state(const ModelPoint& point) {
  if (point.fragment_size == 0) throw EmptyFragmentError();
  check_fragment_size(point.fragment_size, point.couplings.n_env());

  const int n = point.couplings.n_env();
  ComplexMatrix forward = omega(point.couplings[0], point.time, n, +1);
  ComplexMatrix backward = omega(point.couplings[0], point.time, n, -1);
  for (int m = 1; m < point.fragment_size; ++m) {
    forward = linalg::kron(forward, omega(point.couplings[m], point.time, n, +1));
    backward = linalg::kron(backward, omega(point.couplings[m], point.time, n, -1));
  }

  const double p = std::cos(point.theta) * std::cos(point.theta);
  const double s2 = sin_2theta(point.theta);
  FragmentState out;
  out.rho = p * forward + (1.0 - p) * backward;
  out.drho_dtheta = s2 * (backward - forward);
  return out;
}

ComplexVector branch_state(double time, const CouplingSet& couplings, int fragment_size,
                           int sign) {
  check_fragment_size(fragment_size, couplings.n_env());
  const int n = couplings.n_env();
  const double dir = sign >= 0 ? 1.0 : -1.0;
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2;
  ComplexVector psi = ComplexVector::Ones(1);
  for (int m = 0; m < fragment_size; ++m) {
    // e^{i J sigma_z t / sqrt N} |+>
    const double half = 0.5 * dir * branch_phase(couplings[m], time, n);
    ComplexVector spin(2);
    spin << std::polar(inv_sqrt2, half), std::polar(inv_sqrt2, -half);
    psi = linalg::kron(psi, spin);
  }
  return psi;
}

double overlap_c(double time, const CouplingSet& couplings, int fragment_size) {
  check_fragment_size(fragment_size, couplings.n_env());
  double c = 1.0;
  for (int m = 0; m < fragment_size; ++m) {
    c *= std::cos(branch_phase(couplings[m], time, couplings.n_env()));
  }
  return c;
}

}  // namespace qdarwin
