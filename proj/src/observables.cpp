#include "qdarwin/observables.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qdarwin/errors.hpp"

namespace qdarwin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PrecisionResult no_information(double mean_a, double var_a) {
  return {kInf, 0.0, mean_a, var_a};
}

struct FragmentSums {
  double x = 0.0;   // sum <sigma_x>
  double y = 0.0;   // sum <sigma_y>, Omega(t) branch
  double xx = 0.0;  // sum <sigma_x>^2
  double yy = 0.0;
  double xy = 0.0;
};

FragmentSums fragment_sums(const ModelPoint& point) {
  if (point.fragment_size == 0) throw EmptyFragmentError();
  FragmentSums s;
  for (int m = 0; m < point.fragment_size; ++m) {
    const auto e = local_expectations(point.couplings[m], point.time, point.couplings.n_env());
    s.x += e.x;
    s.y += e.y;
    s.xx += e.x * e.x;
    s.yy += e.y * e.y;
    s.xy += e.x * e.y;
  }
  return s;
}

}  // namespace

ObservableSpec::ObservableSpec(double q) : q_(q) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw DomainError("ObservableSpec: q must lie in [0, 1), got " + std::to_string(q));
  }
}

LocalExpectations local_expectations(double j, double time, int n_env) {
  if (n_env < 1) throw DomainError("local_expectations: n_env must be >= 1");
  const double phase = branch_phase(j, time, n_env);
  return {std::cos(phase), -std::sin(phase), 0.0};
}

double s_y_expectation(const ModelPoint& point) {
  if (point.fragment_size == 0) throw EmptyFragmentError();
  double sum = 0.0;
  for (int m = 0; m < point.fragment_size; ++m) {
    sum += std::sin(branch_phase(point.couplings[m], point.time, point.couplings.n_env()));
  }
  return -std::cos(2.0 * point.theta) * sum;
}

AqMoments aq_moments(const ModelPoint& point, const ObservableSpec& spec) {
  const FragmentSums s = fragment_sums(point);
  const double q = spec.q();
  const double p = 1.0 - q;
  const double cos2 = std::cos(2.0 * point.theta);
  const double frag = point.fragment_size;

  AqMoments out;
  out.mean = q * s.x + p * cos2 * s.y;
  // Same-site terms: sigma_x^2 = sigma_y^2 = 1 and {sigma_x, sigma_y} = 0.
  // Cross-site terms factorize within each branch; the xy sum is odd under
  // y -> -y, so the branches combine into cos(2 theta).
  out.second_moment = (q * q + p * p) * frag + q * q * (s.x * s.x - s.xx) +
                      p * p * (s.y * s.y - s.yy) + 2.0 * q * p * cos2 * (s.x * s.y - s.xy);
  return out;
}

PrecisionResult precision_finite(const ModelPoint& point, const ObservableSpec& spec) {
  const FragmentSums s = fragment_sums(point);
  const double q = spec.q();
  const double p = 1.0 - q;
  const double cos2 = std::cos(2.0 * point.theta);
  const double sin2 = sin_2theta(point.theta);

  // Var(A_q) with x^2 + y^2 = 1 used per site; avoids <A^2> - <A>^2 cancellation.
  const double residual = p * p * point.fragment_size + (2.0 * q - 1.0) * s.yy -
                          2.0 * q * p * cos2 * s.xy;
  const double signal2 = sin2 * sin2 * p * p * s.y * s.y;
  const double mean_a = q * s.x + p * cos2 * s.y;
  const double var_a = residual + signal2;

  // d<A_q>/dtheta = -2 sin(2 theta) (1 - q) sum y
  if (signal2 == 0.0) return no_information(mean_a, var_a);
  const double variance = 0.25 * (1.0 + residual / signal2);
  return {variance, 1.0 / variance, mean_a, var_a};
}

PrecisionResult precision_thermodynamic(double theta, double time, double f, double jmean,
                                        const ObservableSpec& spec) {
  (void)spec;  // the limit is q-independent; spec already validated q
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("precision_thermodynamic: f must lie in (0, 1]");
  if (!(time >= 0.0)) throw DomainError("precision_thermodynamic: time must be >= 0");
  if (jmean == 0.0) {
    throw UnsupportedRegimeError(
        "precision_thermodynamic: zero-mean couplings have a different thermodynamic limit");
  }
  const double sin2 = sin_2theta(reduce_theta(theta));
  const double rate2 = 4.0 * time * time * sin2 * sin2 * jmean * jmean * f;  // (t / tau_Y)^2
  if (rate2 == 0.0) return no_information(0.0, 0.0);
  const double variance = 0.25 * (1.0 + 1.0 / rate2);
  return {variance, 1.0 / variance, 0.0, 0.0};
}

}  // namespace qdarwin
