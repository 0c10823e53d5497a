#include "gdqfi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gdqfi {

namespace {

void require(bool ok, const std::string& field, const char* rule) {
  if (!ok) {
    throw std::invalid_argument("params." + field + " " + rule);
  }
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("evolution time must be finite and >= 0");
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require(std::isfinite(omega_m) && omega_m > 0.0, "omega_m", "must be finite and > 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma", "must be finite and > 0");
  require(std::isfinite(n_th) && n_th >= 0.0, "n_th", "must be finite and >= 0");
  require(std::isfinite(lambda_g) && lambda_g >= 0.0, "lambda_g", "must be finite and >= 0");
  require(std::isfinite(lambda_T) && lambda_T >= 0.0, "lambda_T", "must be finite and >= 0");
}

double lambda_g_from(const MirrorSpec& m) {
  if (!(m.density >= 0.0) || !(m.omega_m > 0.0) || !std::isfinite(m.density) ||
      !std::isfinite(m.omega_m)) {
    throw std::invalid_argument("mirror density must be >= 0 and omega_m > 0");
  }
  return 2.0 * std::numbers::pi * kNewtonG * m.density / (3.0 * m.omega_m);
}

double lambda_T_from(const BathSpec& b) {
  if (!(b.temperature >= 0.0) || !(b.gamma > 0.0) || !(b.omega_m > 0.0) ||
      !std::isfinite(b.temperature) || !std::isfinite(b.gamma) || !std::isfinite(b.omega_m)) {
    throw std::invalid_argument("bath temperature must be >= 0, gamma and omega_m > 0");
  }
  return kBoltzmann * b.temperature * b.gamma / (kHbar * b.omega_m);
}

Mat2 propagator(double t, const PhysicalParams& p) {
  require_time(t);
  const double damp = std::exp(-0.5 * p.gamma * t);
  const Mat2 r = rotation(p.omega_m * t);
  return {damp * r.a, damp * r.b, damp * r.c, damp * r.d};
}

NoiseKernel noise_kernel(double t, const PhysicalParams& p) {
  require_time(t);
  const double w = p.omega_m;
  const double g = p.gamma;
  const double decay = std::exp(-g * t);
  const double pref = 2.0 / (g * g + 4.0 * w * w);
  const double one_minus_cos = 1.0 - decay * std::cos(2.0 * w * t);
  const double esin = decay * std::sin(2.0 * w * t);
  return {-std::expm1(-g * t), pref * (g * one_minus_cos + 2.0 * w * esin),
          pref * (-2.0 * w * one_minus_cos + g * esin)};
}

NoiseKernel steady_noise_kernel(const PhysicalParams& p) {
  const double w = p.omega_m;
  const double g = p.gamma;
  const double denom = g * g + 4.0 * w * w;
  return {1.0, 2.0 * g / denom, -4.0 * w / denom};
}

namespace {

CovMat2 assemble_noise(const NoiseKernel& k, const PhysicalParams& p) {
  const double lambda = p.lambda_total();
  const double n = k.relax * (p.n_eff() + 0.5);
  const double a = lambda * k.a_per_lambda;
  return {n + a, lambda * k.b_per_lambda, n - a};
}

}  // namespace

CovMat2 noise_cov(double t, const PhysicalParams& p) {
  return assemble_noise(noise_kernel(t, p), p);
}

GaussianState evolve(const GaussianState& s0, double t, const PhysicalParams& p) {
  const Mat2 s = propagator(t, p);
  return {s * s0.mean, congruence(s, s0.cov) + noise_cov(t, p)};
}

GaussianState steady_state(const PhysicalParams& p) {
  return {{}, assemble_noise(steady_noise_kernel(p), p)};
}

MomentState to_moments(const GaussianState& s) {
  const std::complex<double> b{s.mean.x / std::sqrt(2.0), s.mean.p / std::sqrt(2.0)};
  const double n_c = 0.5 * (s.cov.trace() - 1.0);
  const std::complex<double> b2_c{0.5 * (s.cov.xx - s.cov.pp), s.cov.xp};
  return {b, n_c + std::norm(b), b2_c + b * b};
}

GaussianState from_moments(const MomentState& m) {
  const double n_c = m.n - std::norm(m.b);
  const std::complex<double> b2_c = m.b2 - m.b * m.b;
  return {{std::sqrt(2.0) * m.b.real(), std::sqrt(2.0) * m.b.imag()},
          {0.5 + b2_c.real() + n_c, b2_c.imag(), 0.5 - b2_c.real() + n_c}};
}

double default_oracle_step(const PhysicalParams& p) {
  return std::min(1.0 / p.omega_m, 1.0 / p.gamma) / 100.0;
}

GaussianState moment_ode_oracle(const GaussianState& s0, double t, const PhysicalParams& p,
                                double dt) {
  require_time(t);
  const double max_dt = std::min(1.0 / p.omega_m, 1.0 / p.gamma) / 50.0;
  if (!(dt > 0.0) || dt > max_dt) {
    throw std::invalid_argument("oracle step dt must be in (0, min(1/omega_m, 1/gamma)/50]");
  }

  using cplx = std::complex<double>;
  const cplx rot_b{p.gamma / 2.0, p.omega_m};    // d<b>/dt = -rot_b <b>
  const cplx rot_b2{p.gamma, 2.0 * p.omega_m};   // d<b^2>/dt = -rot_b2 <b^2> + 2 Lambda
  const double n_eff = p.n_eff();
  const double drive = 2.0 * p.lambda_total();

  const auto rhs = [&](const MomentState& m) {
    return MomentState{-rot_b * m.b, -p.gamma * m.n + p.gamma * n_eff, -rot_b2 * m.b2 + drive};
  };
  const auto axpy = [](const MomentState& m, double h, const MomentState& k) {
    return MomentState{m.b + h * k.b, m.n + h * k.n, m.b2 + h * k.b2};
  };

  MomentState m = to_moments(s0);
  double elapsed = 0.0;
  while (elapsed < t) {
    const double h = std::min(dt, t - elapsed);
    const MomentState k1 = rhs(m);
    const MomentState k2 = rhs(axpy(m, h / 2.0, k1));
    const MomentState k3 = rhs(axpy(m, h / 2.0, k2));
    const MomentState k4 = rhs(axpy(m, h, k3));
    m.b += h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    m.n += h / 6.0 * (k1.n + 2.0 * k2.n + 2.0 * k3.n + k4.n);
    m.b2 += h / 6.0 * (k1.b2 + 2.0 * k2.b2 + 2.0 * k3.b2 + k4.b2);
    elapsed += h;
    // avoid a denormal-length tail step from accumulated rounding
    if (t - elapsed < 1e-12 * dt) break;
  }
  if (t == 0.0) return s0;
  return from_moments(m);
}

}  // namespace gdqfi
