#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "gdqfi/validation.hpp"

using namespace gdqfi;

namespace {

const SuiteResult& find_suite(const ValidationReport& r, const std::string& name) {
  for (const auto& s : r.suites) {
    if (s.name == name) return s;
  }
  FAIL("no suite " << name);
  return r.suites.front();
}

}  // namespace

TEST_CASE("run_validation: all suites pass with the library model") {
  const ValidationReport r = run_validation(1);
  INFO(r.summary());
  CHECK(r.all_passed());
  CHECK(r.suites.size() == 6);
  for (const auto& s : r.suites) {
    CHECK(s.checks > 0);
    CHECK(s.max_error <= s.tolerance);
  }
  CHECK(r.seconds < 60.0);
}

TEST_CASE("run_validation: other seeds") {
  for (std::uint64_t seed : {2u, 7u, 99u, 12345u}) {
    const ValidationReport r = run_validation(seed);
    INFO(r.summary());
    CHECK(r.all_passed());
  }
}

TEST_CASE("run_validation: deterministic for a fixed seed") {
  const ValidationReport a = run_validation(5);
  const ValidationReport b = run_validation(5);
  REQUIRE(a.suites.size() == b.suites.size());
  for (std::size_t i = 0; i < a.suites.size(); ++i) {
    CHECK(a.suites[i].name == b.suites[i].name);
    CHECK(a.suites[i].max_error == b.suites[i].max_error);
    CHECK(a.suites[i].checks == b.suites[i].checks);
  }
  CHECK(a.summary() == b.summary());
}

TEST_CASE("summary format") {
  ValidationReport r;
  r.suites.push_back({"x", 0.5, 1.0, 3, true});
  r.suites.push_back({"y", 2.0, 1.0, 1, false});
  const std::string s = r.summary();
  CHECK(s.find("PASS x") != std::string::npos);
  CHECK(s.find("FAIL y") != std::string::npos);
  CHECK_FALSE(r.all_passed());
}

TEST_CASE("mutation: sign flip in B(t) is caught by the ODE suite") {
  ValidationModel broken;
  broken.evolve = [](const GaussianState& s, double t, const PhysicalParams& p) {
    GaussianState out = evolve(s, t, p);
    out.cov.xp -= 2.0 * p.lambda_total() * noise_kernel(t, p).b_per_lambda;
    return out;
  };
  const SuiteResult r = check_ode_vs_closed_form(1, broken);
  CHECK_FALSE(r.passed);
  CHECK(r.max_error > 1e-6);
  CHECK_FALSE(run_validation(1, broken).all_passed());
}

TEST_CASE("mutation: wrong purity-term guard is caught by the fidelity suite") {
  ValidationModel broken;
  broken.qfi = [](const GaussianState& s, double t, const PhysicalParams& p) {
    QfiBreakdown q = qfi(s, t, p);
    const double pur = purity(evolve(s, t, p).cov);
    if (1.0 - std::pow(pur, 4) < 0.5) {
      q.total -= q.term_purity;
      q.term_purity = 0.0;
    }
    return q;
  };
  const SuiteResult r = check_fidelity_qfi(1, broken);
  CHECK_FALSE(r.passed);
  const ValidationReport report = run_validation(1, broken);
  CHECK_FALSE(report.all_passed());
  CHECK_FALSE(find_suite(report, r.name).passed);
}

TEST_CASE("mutation: wrong derivative is caught") {
  ValidationModel broken;
  broken.dsigma = [](double t, const PhysicalParams& p) {
    CovMat2 d = dsigma_dlambda_g(t, p);
    d.xp = -d.xp;
    return d;
  };
  CHECK_FALSE(check_derivatives(1, broken).passed);

  ValidationModel broken_p;
  broken_p.dpurity = [](double t, const GaussianState& s, const PhysicalParams& p) {
    return 1.01 * dpurity_dlambda_g(t, s, p);
  };
  CHECK_FALSE(check_derivatives(1, broken_p).passed);
}

TEST_CASE("mutation: unphysical evolution is caught") {
  ValidationModel broken;
  broken.evolve = [](const GaussianState& s, double t, const PhysicalParams& p) {
    GaussianState out = evolve(s, t, p);
    out.cov.xx *= 0.5;
    return out;
  };
  CHECK_FALSE(check_bona_fide_preservation(1, broken).passed);
}

TEST_CASE("draw_point stays in range") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const DrawnPoint d = draw_point(rng, 0.0, 10.0);
    CHECK(d.params.omega_m >= 0.5);
    CHECK(d.params.omega_m <= 2.0);
    CHECK(d.params.gamma >= 0.02);
    CHECK(d.params.gamma <= 0.5);
    CHECK(d.params.lambda_g >= 1e-3);
    CHECK(d.params.lambda_g <= 1e-1);
    CHECK(d.t >= 0.0);
    CHECK(d.t <= 10.0 / d.params.gamma);
    CHECK_NOTHROW(make_probe(d.probe.spec));
  }
}
