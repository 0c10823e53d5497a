#pragma once

// Closed-form evolution of a single-mode Gaussian state under damping at rate
// gamma into a bath of occupation n_th, plus diffusion at the total rate
// Lambda = lambda_g + lambda_T. Times in seconds, rates in 1/s.

#include <complex>

#include "gdqfi/gaussian.hpp"

namespace gdqfi {

inline constexpr double kNewtonG = 6.67430e-11;         // m^3 kg^-1 s^-2
inline constexpr double kBoltzmann = 1.380649e-23;      // J/K
inline constexpr double kHbar = 1.054571817e-34;        // J s

struct PhysicalParams {
  double omega_m = 1.0;
  double gamma = 0.1;
  double n_th = 0.5;
  double lambda_g = 1e-8;
  double lambda_T = 0.0;

  double lambda_total() const { return lambda_g + lambda_T; }
  /// n_th + 2 Lambda / gamma
  double n_eff() const { return n_th + 2.0 * lambda_total() / gamma; }
  double quality_factor() const { return omega_m / gamma; }

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

/// Mirror of density `density` (kg/m^3) on a mechanical mode of frequency omega_m.
struct MirrorSpec {
  double density = 0.0;
  double omega_m = 1.0;
};

/// Thermal bath at `temperature` (K) coupled with rate gamma.
struct BathSpec {
  double temperature = 0.0;
  double gamma = 0.1;
  double omega_m = 1.0;
};

/// 2 pi G density / (3 omega_m)
double lambda_g_from(const MirrorSpec& m);

/// k_B T gamma / (hbar omega_m)
double lambda_T_from(const BathSpec& b);

/// e^{-gamma t / 2} R(omega_m t).
Mat2 propagator(double t, const PhysicalParams& p);

/// Lambda-independent pieces of the accumulated noise at time t:
///   N(t) = relax * (n_eff + 1/2),  A(t) = Lambda * a_per_lambda,  B(t) = Lambda * b_per_lambda.
struct NoiseKernel {
  double relax = 0.0;         // 1 - e^{-gamma t}
  double a_per_lambda = 0.0;  // 2/(gamma^2+4w^2) [gamma(1 - e cos 2wt) + 2w e sin 2wt]
  double b_per_lambda = 0.0;  // 2/(gamma^2+4w^2) [-2w(1 - e cos 2wt) + gamma e sin 2wt]
};

NoiseKernel noise_kernel(double t, const PhysicalParams& p);

/// The t -> infinity limit of noise_kernel.
NoiseKernel steady_noise_kernel(const PhysicalParams& p);

/// Covariance accumulated from the bath and diffusion over [0, t].
CovMat2 noise_cov(double t, const PhysicalParams& p);

/// mean(t) = S mean0;  cov(t) = S cov0 S^T + noise_cov(t).
GaussianState evolve(const GaussianState& s0, double t, const PhysicalParams& p);

/// Stationary state; independent of the initial probe.
GaussianState steady_state(const PhysicalParams& p);

/// First and second moments of the mode operator b.
struct MomentState {
  std::complex<double> b;   // <b>
  double n = 0.0;           // <b^dag b>
  std::complex<double> b2;  // <b^2>
};

MomentState to_moments(const GaussianState& s);
GaussianState from_moments(const MomentState& m);

/// Default step for the moment integrator: min(1/omega_m, 1/gamma)/100.
double default_oracle_step(const PhysicalParams& p);

/// Integrates the moment equations for <b>, <b^dag b>, <b^2> with fixed-step
/// RK4 (the final step is shortened to land on t). Independent of evolve().
/// Throws std::invalid_argument unless 0 < dt <= min(1/omega_m, 1/gamma)/50.
GaussianState moment_ode_oracle(const GaussianState& s0, double t, const PhysicalParams& p,
                                double dt);

}  // namespace gdqfi
