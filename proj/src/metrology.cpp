#include "gdqfi/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gdqfi {

namespace {

CovMat2 dsigma_from_kernel(const NoiseKernel& k, const PhysicalParams& p) {
  // d n_eff / d lambda_g = 2 / gamma
  const double dn = k.relax * 2.0 / p.gamma;
  return {dn + k.a_per_lambda, k.b_per_lambda, dn - k.a_per_lambda};
}

void require_physical(const CovMat2& c) {
  if (!is_bona_fide(c)) {
    throw std::domain_error("covariance matrix violates the uncertainty relation");
  }
}

}  // namespace

CovMat2 dsigma_dlambda_g(double t, const PhysicalParams& p) {
  return dsigma_from_kernel(noise_kernel(t, p), p);
}

CovMat2 steady_dsigma_dlambda_g(const PhysicalParams& p) {
  return dsigma_from_kernel(steady_noise_kernel(p), p);
}

Displacement2 dmean_dlambda_g(double /*t*/, const GaussianState& /*s0*/,
                              const PhysicalParams& /*p*/) {
  return {0.0, 0.0};
}

double purity_derivative(const CovMat2& cov, const CovMat2& dcov) {
  const double p = purity(cov);
  return -0.5 * p * trace_product(inverse(cov), dcov);
}

double dpurity_dlambda_g(double t, const GaussianState& s0, const PhysicalParams& p) {
  return purity_derivative(evolve(s0, t, p).cov, dsigma_dlambda_g(t, p));
}

QfiBreakdown qfi_breakdown(const GaussianState& state, const CovMat2& dcov,
                           const Displacement2& dmean) {
  require_physical(state.cov);
  const CovMat2 inv = inverse(state.cov);
  const double pur = purity(state.cov);
  const double dpur = -0.5 * pur * trace_product(inv, dcov);

  // sigma^-1 dsigma is not symmetric; square it explicitly.
  const double m00 = inv.xx * dcov.xx + inv.xp * dcov.xp;
  const double m01 = inv.xx * dcov.xp + inv.xp * dcov.pp;
  const double m10 = inv.xp * dcov.xx + inv.pp * dcov.xp;
  const double m11 = inv.xp * dcov.xp + inv.pp * dcov.pp;
  const double tr_sq = m00 * m00 + 2.0 * m01 * m10 + m11 * m11;

  QfiBreakdown out;
  out.term_cov = tr_sq / (2.0 * (1.0 + pur * pur));

  const double mixedness = 1.0 - std::pow(pur, 4);
  if (mixedness < kPureStateGuard) {
    if (std::abs(dpur) >= kPureStateGuard) {
      throw std::domain_error("pure state with non-stationary purity: QFI purity term diverges");
    }
    out.term_purity = 0.0;
  } else {
    out.term_purity = 2.0 * dpur * dpur / mixedness;
  }

  out.term_disp = dmean.x * (inv.xx * dmean.x + inv.xp * dmean.p) +
                  dmean.p * (inv.xp * dmean.x + inv.pp * dmean.p);
  out.total = out.term_cov + out.term_purity + out.term_disp;
  return out;
}

QfiBreakdown qfi(const GaussianState& s0, double t, const PhysicalParams& p) {
  return qfi_breakdown(evolve(s0, t, p), dsigma_dlambda_g(t, p), dmean_dlambda_g(t, s0, p));
}

QfiBreakdown steady_qfi(const PhysicalParams& p) {
  return qfi_breakdown(steady_state(p), steady_dsigma_dlambda_g(p), {});
}

double bures_defect(const GaussianState& a, const GaussianState& b) {
  require_physical(a.cov);
  require_physical(b.cov);
  // F = exp(-q/2) / G,  G = sqrt(Delta + delta) - sqrt(delta),
  // Delta = det(S), delta = (4 det a - 1)(4 det b - 1)/4, S = a + b, D = b - a.
  // With 4 det a = det S - c + det D and 4 det b = det S + c + det D,
  //   Delta + delta = ((det S + 1)^2 + k)/4,  delta = ((det S - 1)^2 + k)/4,
  //   k = 2 (det S - 1) det D + det D^2 - c^2,
  // so G - 1 is formed from the small quantities c, det D alone.
  const CovMat2 sum = a.cov + b.cov;
  const CovMat2 diff = b.cov - a.cov;
  const double det_s = sum.det();
  const double det_d = diff.det();
  const double c = sum.xx * diff.pp + sum.pp * diff.xx - 2.0 * sum.xp * diff.xp;
  const double k = 2.0 * (det_s - 1.0) * det_d + det_d * det_d - c * c;

  const double upper = std::sqrt(std::max((det_s + 1.0) * (det_s + 1.0) + k, 0.0)) + (det_s + 1.0);
  const double lower_root = std::sqrt(std::max((det_s - 1.0) * (det_s - 1.0) + k, 0.0));
  const double lower = lower_root + std::max(det_s - 1.0, 0.0);
  const double g_minus_one = 0.5 * (k / upper - (lower > 0.0 ? k / lower : 0.0));

  const double du_x = b.mean.x - a.mean.x;
  const double du_p = b.mean.p - a.mean.p;
  const CovMat2 inv = inverse(sum);
  const double quad =
      du_x * (inv.xx * du_x + inv.xp * du_p) + du_p * (inv.xp * du_x + inv.pp * du_p);

  // 1 - sqrt(F) = 1 - exp(-q/4 - log(G)/2)
  return -std::expm1(-0.25 * quad - 0.5 * std::log1p(g_minus_one));
}

double gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
  const double root = 1.0 - bures_defect(a, b);
  return root * root;
}

double qfi_fidelity_oracle(const GaussianState& s0, double t, const PhysicalParams& p,
                           double eps) {
  if (!(eps > 0.0) || p.lambda_g - eps < 0.0) {
    throw std::invalid_argument("oracle step eps must satisfy 0 < eps <= lambda_g");
  }
  PhysicalParams lo = p;
  PhysicalParams hi = p;
  lo.lambda_g -= eps;
  hi.lambda_g += eps;
  const double defect = bures_defect(evolve(s0, t, lo), evolve(s0, t, hi));
  return 8.0 * defect / (4.0 * eps * eps);
}

double homodyne_cfi(const GaussianState& s0, double t, const PhysicalParams& p, double theta) {
  const CovMat2 cov = evolve(s0, t, p).cov;
  const CovMat2 dcov = dsigma_dlambda_g(t, p);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double v = c * c * cov.xx + 2.0 * c * s * cov.xp + s * s * cov.pp;
  const double dv = c * c * dcov.xx + 2.0 * c * s * dcov.xp + s * s * dcov.pp;
  return dv * dv / (2.0 * v * v);
}

HomodyneOptimum best_homodyne_cfi(const GaussianState& s0, double t, const PhysicalParams& p) {
  HomodyneOptimum best;
  for (int i = 0; i < kHomodyneThetaPoints; ++i) {
    const double theta = std::numbers::pi * i / kHomodyneThetaPoints;
    const double cfi = homodyne_cfi(s0, t, p, theta);
    if (i == 0 || cfi > best.cfi) best = {theta, cfi};
  }
  return best;
}

CrbReport cramer_rao(double qfi_total, std::int64_t n) {
  if (n < 1) {
    throw std::invalid_argument("number of repetitions must be >= 1");
  }
  if (!(qfi_total > 0.0)) {
    throw std::domain_error("parameter not identifiable at this point");
  }
  return {qfi_total, n, 1.0 / (static_cast<double>(n) * qfi_total)};
}

}  // namespace gdqfi
