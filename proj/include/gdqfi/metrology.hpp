#pragma once

// Fisher information of evolved Gaussian probes with respect to lambda_g.

#include <cstdint>

#include "gdqfi/dynamics.hpp"
#include "gdqfi/gaussian.hpp"

namespace gdqfi {

/// The three additive contributions to the single-mode Gaussian QFI.
struct QfiBreakdown {
  double term_cov = 0.0;     // Tr[(sigma^-1 dsigma)^2] / (2 (1 + P^2))
  double term_purity = 0.0;  // 2 (dP)^2 / (1 - P^4)
  double term_disp = 0.0;    // dmean^T sigma^-1 dmean
  double total = 0.0;
};

struct CrbReport {
  double qfi = 0.0;
  std::int64_t n_repetitions = 1;
  double variance_bound = 0.0;
};

/// Threshold on 1 - P^4 below which the state is treated as pure.
inline constexpr double kPureStateGuard = 1e-12;

/// Analytic d sigma(t) / d lambda_g. Regular at Lambda = 0.
CovMat2 dsigma_dlambda_g(double t, const PhysicalParams& p);

/// The t -> infinity limit of dsigma_dlambda_g.
CovMat2 steady_dsigma_dlambda_g(const PhysicalParams& p);

/// d lambda_g of the evolved mean; zero because the mean dynamics do not
/// depend on the diffusion rate.
Displacement2 dmean_dlambda_g(double t, const GaussianState& s0, const PhysicalParams& p);

/// -(P/2) Tr(sigma^-1 dsigma) for a state with covariance `cov`.
double purity_derivative(const CovMat2& cov, const CovMat2& dcov);

double dpurity_dlambda_g(double t, const GaussianState& s0, const PhysicalParams& p);

/// QFI of a one-parameter family of single-mode Gaussian states, given the
/// state and its parameter derivatives. Throws std::domain_error when the
/// state is pure but its purity still moves (1 - P^4 < kPureStateGuard and
/// |dP| >= kPureStateGuard).
QfiBreakdown qfi_breakdown(const GaussianState& state, const CovMat2& dcov,
                           const Displacement2& dmean);

QfiBreakdown qfi(const GaussianState& s0, double t, const PhysicalParams& p);

/// Stationary-limit QFI; independent of the probe.
QfiBreakdown steady_qfi(const PhysicalParams& p);

/// Uhlmann fidelity of two single-mode Gaussian states (squared-overlap
/// convention, |<a|b>|^2 for pure states).
double gaussian_fidelity(const GaussianState& a, const GaussianState& b);

/// 1 - sqrt(F), evaluated without forming F near 1.
double bures_defect(const GaussianState& a, const GaussianState& b);

/// QFI via the Bures metric: 8 (1 - sqrt F(rho(l - eps), rho(l + eps))) / (2 eps)^2.
/// Throws std::invalid_argument unless 0 < eps <= lambda_g.
double qfi_fidelity_oracle(const GaussianState& s0, double t, const PhysicalParams& p,
                           double eps);

/// Classical Fisher information of a homodyne measurement of
/// x cos(theta) + p sin(theta).
double homodyne_cfi(const GaussianState& s0, double t, const PhysicalParams& p, double theta);

struct HomodyneOptimum {
  double theta = 0.0;
  double cfi = 0.0;
};

inline constexpr int kHomodyneThetaPoints = 64;

/// Maximum of homodyne_cfi over kHomodyneThetaPoints uniform angles in [0, pi).
HomodyneOptimum best_homodyne_cfi(const GaussianState& s0, double t, const PhysicalParams& p);

/// Throws std::domain_error("parameter not identifiable at this point") when
/// qfi_total <= 0, std::invalid_argument when n < 1.
CrbReport cramer_rao(double qfi_total, std::int64_t n);

}  // namespace gdqfi
