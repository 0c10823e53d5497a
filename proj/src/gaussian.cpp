#include "gdqfi/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gdqfi {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("probe parameter '") + what + "' is not finite");
  }
}

void require_occupation(double n_th0) {
  require_finite(n_th0, "n_th0");
  if (n_th0 < 0.0) {
    throw std::invalid_argument("probe parameter 'n_th0' must be >= 0");
  }
}

// (n + 1/2) R(phi) diag(e^{-2r}, e^{2r}) R(phi)^T
CovMat2 squeezed_cov(double n_th0, double r, double phi) {
  require_finite(r, "r");
  require_finite(phi, "phi");
  const double scale = n_th0 + 0.5;
  const CovMat2 diag{scale * std::exp(-2.0 * r), 0.0, scale * std::exp(2.0 * r)};
  return congruence(rotation(phi), diag);
}

void require_physical(const CovMat2& c) {
  if (!is_bona_fide(c)) {
    throw std::domain_error("covariance matrix violates the uncertainty relation");
  }
}

}  // namespace

Mat2 rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, s, -s, c};
}

CovMat2 congruence(const Mat2& m, const CovMat2& c) {
  // m * c
  const double t00 = m.a * c.xx + m.b * c.xp;
  const double t01 = m.a * c.xp + m.b * c.pp;
  const double t10 = m.c * c.xx + m.d * c.xp;
  const double t11 = m.c * c.xp + m.d * c.pp;
  const double xp = 0.5 * ((t00 * m.c + t01 * m.d) + (t10 * m.a + t11 * m.b));
  return {t00 * m.a + t01 * m.b, xp, t10 * m.c + t11 * m.d};
}

CovMat2 inverse(const CovMat2& c) {
  const double det = c.det();
  if (det == 0.0 || !std::isfinite(det)) {
    throw std::domain_error("singular covariance matrix");
  }
  return {c.pp / det, -c.xp / det, c.xx / det};
}

double trace_product(const CovMat2& a, const CovMat2& b) {
  return a.xx * b.xx + 2.0 * a.xp * b.xp + a.pp * b.pp;
}

std::string probe_kind(const ProbeSpec& spec) {
  struct Visitor {
    std::string operator()(const Coherent&) const { return "coherent"; }
    std::string operator()(const Thermal&) const { return "thermal"; }
    std::string operator()(const SqueezedVacuum&) const { return "squeezed_vacuum"; }
    std::string operator()(const SqueezedThermal&) const { return "squeezed_thermal"; }
  };
  return std::visit(Visitor{}, spec);
}

GaussianState make_probe(const ProbeSpec& spec) {
  struct Visitor {
    GaussianState operator()(const Coherent& c) const {
      require_finite(c.alpha_re, "alpha_re");
      require_finite(c.alpha_im, "alpha_im");
      return {{std::sqrt(2.0) * c.alpha_re, std::sqrt(2.0) * c.alpha_im}, {0.5, 0.0, 0.5}};
    }
    GaussianState operator()(const Thermal& t) const {
      require_occupation(t.n_th0);
      const double v = t.n_th0 + 0.5;
      return {{}, {v, 0.0, v}};
    }
    GaussianState operator()(const SqueezedVacuum& s) const {
      return {{}, squeezed_cov(0.0, s.r, s.phi)};
    }
    GaussianState operator()(const SqueezedThermal& s) const {
      require_occupation(s.n_th0);
      return {{}, squeezed_cov(s.n_th0, s.r, s.phi)};
    }
  };
  return std::visit(Visitor{}, spec);
}

double energy(const GaussianState& s) {
  return 0.5 * (s.cov.trace() - 1.0) + 0.5 * (s.mean.x * s.mean.x + s.mean.p * s.mean.p);
}

bool is_bona_fide(const CovMat2& c, double tol) {
  return c.xx > 0.0 && c.pp > 0.0 && c.det() >= 0.25 - tol;
}

double purity(const CovMat2& c) {
  require_physical(c);
  return std::min(1.0, 0.5 / std::sqrt(c.det()));
}

double symplectic_eigenvalue(const CovMat2& c) {
  require_physical(c);
  return std::sqrt(c.det());
}

}  // namespace gdqfi
