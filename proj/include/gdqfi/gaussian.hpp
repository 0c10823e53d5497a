#pragma once

// Single-mode Gaussian states in dimensionless quadratures.
//
// Conventions: hbar = 1, x = (b + b^dag)/sqrt(2), p = (b - b^dag)/(i sqrt(2)),
// vacuum covariance = I/2, symplectic form [[0, 1], [-1, 0]].

#include <string>
#include <variant>

namespace gdqfi {

/// Absolute tolerance on det(sigma) - 1/4 used by the physicality checks.
inline constexpr double kBonaFideTol = 1e-10;

/// Symmetric 2x2 matrix of quadrature (co)variances. Also used for
/// derivatives of covariance matrices, which need not be physical.
struct CovMat2 {
  double xx = 0.0;
  double xp = 0.0;
  double pp = 0.0;

  double det() const { return xx * pp - xp * xp; }
  double trace() const { return xx + pp; }

  friend CovMat2 operator+(const CovMat2& a, const CovMat2& b) {
    return {a.xx + b.xx, a.xp + b.xp, a.pp + b.pp};
  }
  friend CovMat2 operator-(const CovMat2& a, const CovMat2& b) {
    return {a.xx - b.xx, a.xp - b.xp, a.pp - b.pp};
  }
  friend CovMat2 operator*(double s, const CovMat2& a) {
    return {s * a.xx, s * a.xp, s * a.pp};
  }
  friend bool operator==(const CovMat2&, const CovMat2&) = default;
};

struct Displacement2 {
  double x = 0.0;
  double p = 0.0;

  friend bool operator==(const Displacement2&, const Displacement2&) = default;
};

struct GaussianState {
  Displacement2 mean;
  CovMat2 cov{0.5, 0.0, 0.5};

  friend bool operator==(const GaussianState&, const GaussianState&) = default;
};

/// General real 2x2 matrix, row-major.
struct Mat2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;

  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  friend Displacement2 operator*(const Mat2& m, const Displacement2& v) {
    return {m.a * v.x + m.b * v.p, m.c * v.x + m.d * v.p};
  }
};

/// R(theta) = [[cos, sin], [-sin, cos]].
Mat2 rotation(double theta);

/// m * c * m^T, symmetrized.
CovMat2 congruence(const Mat2& m, const CovMat2& c);

/// Closed-form inverse. Throws std::domain_error when the matrix is singular.
CovMat2 inverse(const CovMat2& c);

/// Tr(a * b) for symmetric a, b.
double trace_product(const CovMat2& a, const CovMat2& b);

/// Probe preparations at the level of their defining parameters.
struct Coherent {
  double alpha_re = 0.0;
  double alpha_im = 0.0;
};
struct Thermal {
  double n_th0 = 0.0;
};
struct SqueezedVacuum {
  double r = 0.0;
  double phi = 0.0;
};
struct SqueezedThermal {
  double n_th0 = 0.0;
  double r = 0.0;
  double phi = 0.0;
};
using ProbeSpec = std::variant<Coherent, Thermal, SqueezedVacuum, SqueezedThermal>;

/// Short lowercase family name ("coherent", "thermal", ...).
std::string probe_kind(const ProbeSpec& spec);

/// Builds the Gaussian state of a probe. Throws std::invalid_argument on
/// negative occupations or non-finite parameters.
GaussianState make_probe(const ProbeSpec& spec);

/// Mean number of excitations: (Tr sigma - 1)/2 + |mean|^2/2.
double energy(const GaussianState& s);

/// xx > 0, pp > 0 and det >= 1/4 - tol.
bool is_bona_fide(const CovMat2& c, double tol = kBonaFideTol);

/// 1/(2 sqrt(det)). Throws std::domain_error for non-physical input.
double purity(const CovMat2& c);

/// sqrt(det) for a single mode. Throws std::domain_error for non-physical input.
double symplectic_eigenvalue(const CovMat2& c);

}  // namespace gdqfi
