#include <doctest.h>

#include <chrono>

#include <json.hpp>

#include "qdarwin/verify.hpp"

using namespace qdarwin::sweep;

TEST_SUITE("verify") {
  TEST_CASE("test matrix layout") {
    const int sizes[] = {4, 6};
    const auto pts = oracle_test_matrix(sizes, 4, 3, 1);
    CHECK(pts.size() == 2 * 4 * 3);
    CHECK(pts[0].couplings.n_env() == 4);
    CHECK(pts[0].fragment_size == 1);
    CHECK(pts.back().fragment_size == 4);
    for (const auto& p : pts) {
      CHECK(p.theta >= 0.1);
      CHECK(p.time <= 3.0);
    }
    const auto again = oracle_test_matrix(sizes, 4, 3, 1);
    CHECK(again[5].couplings.values() == pts[5].couplings.values());
  }

  TEST_CASE("fast verification passes quickly") {
    const auto start = std::chrono::steady_clock::now();
    const VerifyReport report = verify({});
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& c : report.checks) {
      INFO(c.name, " max_error ", c.max_error, " tolerance ", c.tolerance);
      CHECK(c.passed);
    }
    CHECK(report.passed());
    CHECK(seconds < 30.0);

    const auto doc = nlohmann::json::parse(report.to_json());
    CHECK(doc["scope"] == "fast");
    CHECK(doc["passed"] == true);
    CHECK(doc["checks"].size() == report.checks.size());
  }

  TEST_CASE("a tampered closed form is caught") {
    VerifyOptions opts;
    opts.tamper_closed_form = true;
    const VerifyReport report = verify(opts);
    CHECK_FALSE(report.passed());
    CHECK_FALSE(report.checks.front().passed);
  }
}
