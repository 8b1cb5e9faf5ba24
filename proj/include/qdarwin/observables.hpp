#pragma once

#include "qdarwin/spinstar.hpp"

namespace qdarwin {

/// A_q = sum_i [q sigma_x^i + (1 - q) sigma_y^i] over the fragment; q = 0 is S_y.
class ObservableSpec {
 public:
  explicit ObservableSpec(double q = 0.0);
  double q() const { return q_; }

 private:
  double q_;
};

struct LocalExpectations {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct AqMoments {
  double mean = 0.0;
  double second_moment = 0.0;
};

/// Error-propagation result. variance_theta is +inf (and precision 0) when
/// d<A>/dtheta vanishes. The thermodynamic route leaves mean_a and var_a at 0;
/// both grow without bound with N.
struct PrecisionResult {
  double variance_theta = 0.0;
  double precision = 0.0;
  double mean_a = 0.0;
  double var_a = 0.0;

  bool informative() const { return precision > 0.0; }
};

/// Single-spin moments of Omega(t); the Omega(-t) branch has y -> -y.
LocalExpectations local_expectations(double j, double time, int n_env);

/// <S_y> = -cos(2 theta) sum_m sin(2 J_m t / sqrt N).
double s_y_expectation(const ModelPoint& point);

AqMoments aq_moments(const ModelPoint& point, const ObservableSpec& spec);

PrecisionResult precision_finite(const ModelPoint& point, const ObservableSpec& spec);

/// N -> infinity limit, 1/4 [1 + 1 / (4 t^2 sin^2(2 theta) <J>^2 f)].
///
/// The S_x admixture drops out in this limit: every environment spin stays
/// close to |+>, so S_x contributes neither signal nor noise and the result
/// does not depend on q. Throws UnsupportedRegimeError for <J> = 0, whose limit
/// has a different form.
PrecisionResult precision_thermodynamic(double theta, double time, double f, double jmean,
                                        const ObservableSpec& spec);

}  // namespace qdarwin
