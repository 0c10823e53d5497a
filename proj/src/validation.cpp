#include "gdqfi/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace gdqfi {

bool ValidationReport::all_passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

std::string ValidationReport::summary() const {
  std::string out;
  char buf[256];
  for (const auto& s : suites) {
    std::snprintf(buf, sizeof buf, "%s %-28s max_error=%.3e tol=%.1e checks=%d\n",
                  s.passed ? "PASS" : "FAIL", s.name.c_str(), s.max_error, s.tolerance, s.checks);
    out += buf;
  }
  return out;
}

DrawnPoint draw_point(std::mt19937_64& rng, double t_lo_damping, double t_hi_damping) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  DrawnPoint d;
  d.params.omega_m = between(0.5, 2.0);
  d.params.gamma = between(0.02, 0.5);
  d.params.n_th = between(0.0, 2.0);
  d.params.lambda_g = std::pow(10.0, between(-3.0, -1.0));
  d.params.lambda_T = between(0.0, 1e-2);

  const double phi = between(0.0, 2.0 * std::numbers::pi);
  switch (static_cast<int>(unit(rng) * 4.0)) {
    case 0:
      d.probe = {"coherent", Coherent{between(-2.0, 2.0), between(-2.0, 2.0)}};
      break;
    case 1:
      d.probe = {"thermal", Thermal{between(0.0, 4.0)}};
      break;
    case 2:
      d.probe = {"squeezed_vacuum", SqueezedVacuum{between(0.0, 1.5), phi}};
      break;
    default:
      d.probe = {"squeezed_thermal", SqueezedThermal{between(0.0, 2.0), between(0.0, 1.2), phi}};
      break;
  }
  d.t = between(t_lo_damping, t_hi_damping) / d.params.gamma;
  return d;
}

double validation_oracle_step(const PhysicalParams& p) {
  return std::min(1.0 / p.omega_m, 1.0 / p.gamma) / 1000.0;
}

double fd_step(const PhysicalParams& p) { return 1e-3 * std::max(p.lambda_g, 1e-9); }

namespace {

double max_abs(const CovMat2& c) {
  return std::max({std::abs(c.xx), std::abs(c.xp), std::abs(c.pp)});
}

double max_abs_diff(const GaussianState& a, const GaussianState& b) {
  return std::max({std::abs(a.mean.x - b.mean.x), std::abs(a.mean.p - b.mean.p),
                   max_abs(a.cov - b.cov)});
}

double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

SuiteResult start(const char* name, double tol) { return {name, 0.0, tol, 0, false}; }

void record(SuiteResult& s, double err) {
  // NaN must fail the suite
  s.max_error = std::isnan(err) ? err : std::max(s.max_error, err);
  ++s.checks;
}

SuiteResult finish(SuiteResult s) {
  s.passed = !std::isnan(s.max_error) && s.max_error < s.tolerance;
  return s;
}

}  // namespace

SuiteResult check_fixed_energy() {
  SuiteResult s = start("fixed_energy", 1e-3);
  for (const auto& probe : fixed_energy_probes()) record(s, std::abs(energy(make_probe(probe.spec)) - 4.0));
  return finish(s);
}

SuiteResult check_ode_vs_closed_form(std::uint64_t seed, const ValidationModel& model) {
  SuiteResult s = start("ode_vs_closed_form", 1e-8);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < kRandomDraws; ++i) {
    const DrawnPoint d = draw_point(rng, 0.0, 10.0);
    const GaussianState s0 = make_probe(d.probe.spec);
    const GaussianState closed = model.evolve(s0, d.t, d.params);
    const GaussianState ode = moment_ode_oracle(s0, d.t, d.params, validation_oracle_step(d.params));
    record(s, max_abs_diff(closed, ode));
  }
  return finish(s);
}

SuiteResult check_derivatives(std::uint64_t seed, const ValidationModel& model) {
  SuiteResult s = start("fd_vs_analytic_derivatives", 1e-6);
  std::mt19937_64 rng(seed + 1);
  for (int i = 0; i < kRandomDraws; ++i) {
    DrawnPoint d = draw_point(rng, 0.0, 10.0);
    d.t = std::max(d.t, 0.1);
    const GaussianState s0 = make_probe(d.probe.spec);
    const double h = fd_step(d.params);
    PhysicalParams lo = d.params;
    PhysicalParams hi = d.params;
    lo.lambda_g -= h;
    hi.lambda_g += h;
    const GaussianState s_lo = evolve(s0, d.t, lo);
    const GaussianState s_hi = evolve(s0, d.t, hi);

    const CovMat2 fd_cov = (1.0 / (2.0 * h)) * (s_hi.cov - s_lo.cov);
    const CovMat2 analytic = model.dsigma(d.t, d.params);
    record(s, max_abs(analytic - fd_cov) / max_abs(analytic));

    const double fd_pur = (purity(s_hi.cov) - purity(s_lo.cov)) / (2.0 * h);
    record(s, rel_err(model.dpurity(d.t, s0, d.params), fd_pur));
  }
  return finish(s);
}

SuiteResult check_fidelity_qfi(std::uint64_t seed, const ValidationModel& model,
                               bool include_fixed_points) {
  SuiteResult s = start("fidelity_qfi_vs_analytic", 1e-4);
  auto compare = [&](const GaussianState& s0, double t, const PhysicalParams& p) {
    const double eps = fd_step(p);
    const double oracle = qfi_fidelity_oracle(s0, t, p, eps);
    const double refined = qfi_fidelity_oracle(s0, t, p, eps / 2.0);
    record(s, rel_err(model.qfi(s0, t, p).total, refined));
    // Richardson certificate: halving eps must not move the oracle
    record(s, rel_err(oracle, refined));
  };

  std::mt19937_64 rng(seed + 2);
  for (int i = 0; i < kRandomDraws; ++i) {
    const DrawnPoint d = draw_point(rng, 0.01, 10.0);
    compare(make_probe(d.probe.spec), d.t, d.params);
  }
  if (include_fixed_points) {
    // short times, where the purity term dominates for the pure probes
    PhysicalParams p;
    p.lambda_g = 1e-2;
    for (const auto& probe : fixed_energy_probes()) {
      compare(make_probe(probe.spec), short_time_sample(p), p);
      compare(make_probe(probe.spec), 1.0 / p.gamma, p);
    }
  }
  return finish(s);
}

SuiteResult check_cfi_bound(std::uint64_t seed, const ValidationModel& model) {
  // max over points of (CFI - QFI); must stay below the slack
  SuiteResult s = start("cfi_le_qfi", 1e-12);
  s.max_error = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed + 3);
  for (int i = 0; i < kRandomDraws; ++i) {
    const DrawnPoint d = draw_point(rng, 0.0, 10.0);
    const GaussianState s0 = make_probe(d.probe.spec);
    const double q = model.qfi(s0, d.t, d.params).total;
    for (int k = 0; k < kHomodyneThetaPoints; ++k) {
      const double theta = std::numbers::pi * k / kHomodyneThetaPoints;
      const double excess = homodyne_cfi(s0, d.t, d.params, theta) - q;
      s.max_error = std::max(s.max_error, excess);
      ++s.checks;
    }
  }
  return finish(s);
}

SuiteResult check_bona_fide_preservation(std::uint64_t seed, const ValidationModel& model) {
  // largest violation of det >= 1/4 (or of positive diagonals), as a positive number
  SuiteResult s = start("bona_fide_preservation", kBonaFideTol);
  auto check = [&](const GaussianState& s0, const PhysicalParams& p) {
    const int n = 200;
    for (int i = 0; i < n; ++i) {
      const double t = 20.0 / p.gamma * i / (n - 1);
      const CovMat2 c = model.evolve(s0, t, p).cov;
      double violation = std::max(0.0, 0.25 - c.det());
      if (!(c.xx > 0.0) || !(c.pp > 0.0)) violation = std::numeric_limits<double>::infinity();
      record(s, violation);
    }
  };
  const PhysicalParams defaults;
  for (const auto& probe : fixed_energy_probes()) check(make_probe(probe.spec), defaults);
  std::mt19937_64 rng(seed + 4);
  for (int i = 0; i < kRandomDraws; ++i) {
    const DrawnPoint d = draw_point(rng, 0.0, 0.0);
    check(make_probe(d.probe.spec), d.params);
  }
  return finish(s);
}

ValidationReport run_validation(std::uint64_t seed, const ValidationModel& model) {
  const auto t0 = std::chrono::steady_clock::now();
  ValidationReport report;
  report.suites.push_back(check_fixed_energy());
  report.suites.push_back(check_ode_vs_closed_form(seed, model));
  report.suites.push_back(check_fidelity_qfi(seed, model));
  report.suites.push_back(check_derivatives(seed, model));
  report.suites.push_back(check_cfi_bound(seed, model));
  report.suites.push_back(check_bona_fide_preservation(seed, model));
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace gdqfi
