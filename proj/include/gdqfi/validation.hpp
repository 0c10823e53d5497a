#pragma once

// Self-validation: each suite compares a model entry point against an
// independent oracle on randomized and fixed points.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gdqfi/dynamics.hpp"
#include "gdqfi/experiments.hpp"
#include "gdqfi/metrology.hpp"

namespace gdqfi {

struct SuiteResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  int checks = 0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<SuiteResult> suites;
  double seconds = 0.0;

  bool all_passed() const;
  /// One line per suite: "PASS|FAIL <name> max_error=<e> tol=<t> checks=<n>".
  std::string summary() const;
};

/// Entry points under test. Defaults are the library implementations; tests
/// swap in deliberately broken versions to confirm the suites catch them.
struct ValidationModel {
  std::function<GaussianState(const GaussianState&, double, const PhysicalParams&)> evolve =
      [](const GaussianState& s, double t, const PhysicalParams& p) { return gdqfi::evolve(s, t, p); };
  std::function<QfiBreakdown(const GaussianState&, double, const PhysicalParams&)> qfi =
      [](const GaussianState& s, double t, const PhysicalParams& p) { return gdqfi::qfi(s, t, p); };
  std::function<CovMat2(double, const PhysicalParams&)> dsigma =
      [](double t, const PhysicalParams& p) { return dsigma_dlambda_g(t, p); };
  std::function<double(double, const GaussianState&, const PhysicalParams&)> dpurity =
      [](double t, const GaussianState& s, const PhysicalParams& p) { return dpurity_dlambda_g(t, s, p); };
};

/// A randomized test point.
struct DrawnPoint {
  NamedProbe probe;
  PhysicalParams params;
  double t = 0.0;
};

/// Draws probe, parameters and t uniformly in [t_lo, t_hi] damping times.
/// lambda_g is log-uniform in [1e-3, 1e-1] 1/s so that finite-difference and
/// fidelity oracles stay well above double-precision roundoff.
DrawnPoint draw_point(std::mt19937_64& rng, double t_lo_damping, double t_hi_damping);

inline constexpr int kRandomDraws = 20;

/// min(1/omega_m, 1/gamma)/1000; fine enough for 1e-8 agreement over 10/gamma.
double validation_oracle_step(const PhysicalParams& p);

/// Central finite-difference step in lambda_g: 1e-3 max(lambda_g, 1e-9).
double fd_step(const PhysicalParams& p);

SuiteResult check_fixed_energy();
SuiteResult check_ode_vs_closed_form(std::uint64_t seed, const ValidationModel& model = {});
SuiteResult check_derivatives(std::uint64_t seed, const ValidationModel& model = {});
/// Random points plus the four fixed-energy probes at the short-time sample
/// point and at one damping time.
SuiteResult check_fidelity_qfi(std::uint64_t seed, const ValidationModel& model = {},
                               bool include_fixed_points = true);
SuiteResult check_cfi_bound(std::uint64_t seed, const ValidationModel& model = {});
SuiteResult check_bona_fide_preservation(std::uint64_t seed, const ValidationModel& model = {});

ValidationReport run_validation(std::uint64_t seed, const ValidationModel& model = {});

}  // namespace gdqfi
