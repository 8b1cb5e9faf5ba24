#include "qdarwin/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <json.hpp>

#include "qdarwin/linalg.hpp"
#include "qdarwin/observables.hpp"
#include "qdarwin/oracle.hpp"
#include "qdarwin/qfi.hpp"
#include "qdarwin/sweep.hpp"

namespace qdarwin::sweep {

namespace {

using linalg::ComplexMatrix;

// Runs `body` over the points and keeps the largest error it reports.
CheckResult run_check(const std::string& name, double tolerance, std::size_t count,
                      const std::function<double(std::size_t)>& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r{name, true, 0.0, tolerance, count, 0.0};
  for (std::size_t i = 0; i < count; ++i) {
    const double err = body(i);
    if (std::isnan(err)) {
      r.max_error = err;
      break;
    }
    r.max_error = std::max(r.max_error, err);
  }
  r.passed = !std::isnan(r.max_error) && r.max_error <= tolerance;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int count_above(const linalg::RealVector& v, double cutoff) {
  return static_cast<int>((v.array() > cutoff).count());
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["scope"] = scope;
  doc["passed"] = passed();
  doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json item;
    item["name"] = c.name;
    item["passed"] = c.passed;
    item["max_error"] = std::isfinite(c.max_error) ? nlohmann::ordered_json(c.max_error)
                                                   : nlohmann::ordered_json(nullptr);
    item["tolerance"] = c.tolerance;
    item["points"] = c.points;
    item["seconds"] = c.seconds;
    doc["checks"].push_back(item);
  }
  return doc.dump(2);
}

std::vector<ModelPoint> oracle_test_matrix(std::span<const int> env_sizes, int max_fragment,
                                           int points_per_cell, std::uint64_t seed) {
  std::vector<ModelPoint> points;
  std::uint64_t cell = 0;
  for (int n : env_sizes) {
    for (int frag = 1; frag <= std::min(max_fragment, n); ++frag, ++cell) {
      std::mt19937_64 engine(derive_seed(seed, cell));
      std::uniform_real_distribution<double> theta(0.1, std::numbers::pi / 2 - 0.1);
      std::uniform_real_distribution<double> time(0.1, 3.0);
      for (int i = 0; i < points_per_cell; ++i) {
        const double th = theta(engine);
        const double t = time(engine);
        CouplingSet couplings = sample_couplings({0.5, 0.5}, n, engine());
        points.push_back(ModelPoint::make(th, t, std::move(couplings), frag));
      }
    }
  }
  return points;
}

VerifyReport verify(const VerifyOptions& options) {
  const bool full = options.scope == VerifyScope::full;
  const std::vector<int> sizes = full ? std::vector<int>{4, 6, 8, 10} : std::vector<int>{4, 6, 8};
  const auto pts = oracle_test_matrix(sizes, 4, full ? 50 : 10, options.seed);
  const std::size_t n_pts = pts.size();

  VerifyReport report;
  report.scope = full ? "full" : "fast";
  auto& out = report.checks;

  out.push_back(run_check("fragment_state_vs_oracle", 1e-10, n_pts, [&](std::size_t i) {
    const ModelPoint& p = pts[i];
    ModelPoint closed = p;
    if (options.tamper_closed_form) closed.time = -p.time;
    const ComplexMatrix exact =
        oracle::oracle_fragment_state(p.theta, p.time, p.couplings, p.fragment_size);
    return linalg::max_abs(fragment_state(closed).rho - exact);
  }));

  out.push_back(run_check("system_state_vs_oracle", 1e-10, n_pts, [&](std::size_t i) {
    const ModelPoint& p = pts[i];
    return linalg::max_abs(system_state(p.theta, p.time, p.couplings) -
                           oracle::oracle_system_state(p.theta, p.time, p.couplings));
  }));

  out.push_back(run_check("fragment_state_invariants", 1e-10, n_pts, [&](std::size_t i) {
    const FragmentState s = fragment_state(pts[i]);
    const auto eig = linalg::eig_hermitian(s.rho);
    double err = std::max(linalg::hermiticity_residual(s.rho), std::abs(s.rho.trace() - 1.0));
    err = std::max(err, std::max(0.0, -eig.eigenvalues.minCoeff()));
    err = std::max(err, linalg::hermiticity_residual(s.drho_dtheta));
    err = std::max(err, std::abs(s.drho_dtheta.trace()));
    if (count_above(eig.eigenvalues, 1e-12) > 2) return 1.0;
    return err;
  }));

  out.push_back(run_check("drho_vs_finite_difference", 1e-8, n_pts, [&](std::size_t i) {
    const ModelPoint& p = pts[i];
    constexpr double h = 1e-6;
    ModelPoint up = p;
    ModelPoint down = p;
    up.theta += h;
    down.theta -= h;
    const ComplexMatrix fd = (fragment_state(up).rho - fragment_state(down).rho) / (2 * h);
    return linalg::max_abs(fragment_state(p).drho_dtheta - fd);
  }));

  out.push_back(run_check("qfi_closed_vs_oracle", 1e-6, n_pts, [&](std::size_t i) {
    const ModelPoint& p = pts[i];
    return std::abs(qfi_closed_form(p).value -
                    oracle::oracle_qfi(p.theta, p.time, p.couplings, p.fragment_size).value);
  }));

  out.push_back(run_check("qfi_closed_vs_generic", 1e-8, n_pts, [&](std::size_t i) {
    const FragmentState s = fragment_state(pts[i]);
    return std::abs(qfi_closed_form(pts[i]).value - qfi_generic(s.rho, s.drho_dtheta).value);
  }));

  out.push_back(run_check("qfi_theta_independence", 1e-8, n_pts, [&](std::size_t i) {
    ModelPoint other = pts[i];
    other.theta = std::numbers::pi / 2 - pts[i].theta / 2;
    const FragmentState a = fragment_state(pts[i]);
    const FragmentState b = fragment_state(other);
    return std::abs(qfi_generic(a.rho, a.drho_dtheta).value -
                    qfi_generic(b.rho, b.drho_dtheta).value);
  }));

  out.push_back(run_check("qfi_bound_and_monotone_in_fragment", 1e-9, n_pts, [&](std::size_t i) {
    ModelPoint p = pts[i];
    double prev = 0.0;
    double worst = 0.0;
    for (int k = 0; k <= p.couplings.n_env(); ++k) {
      p.fragment_size = k;
      const double v = qfi_closed_form(p).value;
      worst = std::max({worst, prev - v, v - kMaxQfi});
      prev = v;
    }
    return worst;
  }));

  {
    const CouplingSet couplings = sample_couplings({0.5, 0.5}, 8, derive_seed(options.seed, 99));
    std::vector<std::pair<double, double>> grid;
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b <= 6; ++b) grid.emplace_back(0.1 + 0.2 * a, 0.5 * b);
    }
    out.push_back(run_check("system_qfi_constant", 1e-8, grid.size(), [&](std::size_t i) {
      return std::abs(system_qfi(grid[i].first, grid[i].second, couplings).value - kMaxQfi);
    }));
  }

  out.push_back(run_check("sld_residual", 1e-8, n_pts, [&](std::size_t i) {
    const FragmentState s = fragment_state(pts[i]);
    const ComplexMatrix l = sld(pts[i]).full;
    return linalg::max_abs(s.drho_dtheta - 0.5 * (s.rho * l + l * s.rho));
  }));

  out.push_back(run_check("sld_trace_identities", 1e-8, n_pts, [&](std::size_t i) {
    const FragmentState s = fragment_state(pts[i]);
    const ComplexMatrix l = sld(pts[i]).full;
    const double info = qfi_closed_form(pts[i]).value;
    return std::max(std::abs((s.rho * l * l).trace().real() - info),
                    std::abs((s.rho * l).trace()));
  }));

  out.push_back(run_check("optimal_observable_variance", 1e-6, n_pts, [&](std::size_t i) {
    const FragmentState s = fragment_state(pts[i]);
    const ComplexMatrix x = optimal_observable(pts[i]);
    const double mean = (s.rho * x).trace().real();
    const double var = (s.rho * x * x).trace().real() - mean * mean;
    return std::max(std::abs(var * qfi_closed_form(pts[i]).value - 1.0),
                    std::abs(mean - pts[i].theta));
  }));

  const double qs[] = {0.0, 0.3, 0.7};
  out.push_back(run_check("aq_moments_vs_oracle", 1e-9, n_pts, [&](std::size_t i) {
    const ModelPoint& p = pts[i];
    double worst = 0.0;
    for (double q : qs) {
      const ObservableSpec spec(q);
      const AqMoments closed = aq_moments(p, spec);
      const AqMoments exact =
          oracle::oracle_observable_moments(p.theta, p.time, p.couplings, p.fragment_size, spec);
      worst = std::max({worst, std::abs(closed.mean - exact.mean),
                        std::abs(closed.second_moment - exact.second_moment)});
    }
    return worst;
  }));

  out.push_back(run_check("sx_sz_zero_information", 1e-10, n_pts, [&](std::size_t i) {
    const ModelPoint& p = pts[i];
    // The expectations are exactly theta-independent, so a wide step has no
    // truncation error and keeps round-off small.
    constexpr double h = 1e-3;
    const ComplexMatrix up =
        oracle::oracle_fragment_state(p.theta + h, p.time, p.couplings, p.fragment_size);
    const ComplexMatrix down =
        oracle::oracle_fragment_state(p.theta - h, p.time, p.couplings, p.fragment_size);
    double worst = 0.0;
    for (char axis : {'x', 'z'}) {
      const ComplexMatrix s = oracle::collective_pauli(axis, p.fragment_size);
      worst = std::max(worst, std::abs(((s * up).trace() - (s * down).trace()) / (2 * h)));
    }
    return worst;
  }));

  out.push_back(run_check("cramer_rao", 1e-9, n_pts, [&](std::size_t i) {
    const ModelPoint& p = pts[i];
    const double info = qfi_closed_form(p).value;
    double worst = 0.0;
    for (double q : qs) {
      worst = std::max(worst, precision_finite(p, ObservableSpec(q)).precision - info);
    }
    return worst;
  }));

  {
    const std::vector<double> fractions = {0.05, 0.2, 0.5, 1.0};
    out.push_back(run_check("short_time_quadratic_law", 0.01, fractions.size(), [&](std::size_t i) {
      const double f = fractions[i];
      const auto taus = timescales(std::numbers::pi / 4, f, {0.5, 0.5});
      double worst = 0.0;
      for (double x : linspace(1e-3, 0.1, 25)) {
        const double tf = x * taus.tau_f;
        const double ty = x * taus.tau_y;
        const double qfi = qfi_thermodynamic(tf, f, 0.5).value;
        const double prec =
            precision_thermodynamic(std::numbers::pi / 4, ty, f, 0.5, ObservableSpec(0.0)).precision;
        worst = std::max({worst, std::abs(qfi / (4 * x * x) - 1.0),
                          std::abs(prec / (4 * x * x) - 1.0)});
      }
      return worst;
    }));
  }

  if (full) {
    const int big[] = {12};
    const auto extra = oracle_test_matrix(big, 4, 5, options.seed + 1);
    out.push_back(run_check("fragment_state_vs_oracle_n12", 1e-10, extra.size(), [&](std::size_t i) {
      const ModelPoint& p = extra[i];
      return linalg::max_abs(
          fragment_state(p).rho -
          oracle::oracle_fragment_state(p.theta, p.time, p.couplings, p.fragment_size));
    }));
  }

  return report;
}

}  // namespace qdarwin::sweep
