#pragma once

// Shear-dependent extra-stress law S(D) = (mu0 + mu1*|D|)^{r-2} D acting on
// symmetric d x d tensors, with its analytic Jacobian and margin verifiers
// for the coercivity / growth / monotonicity bounds the solver relies on.
//
// r is a real exponent >= 2; powers go through std::pow (0^0 == 1 covers
// the r = 2 edge). mu1 = 0 is admitted as the constant-viscosity
// degenerate mode: the law turns linear and the min(mu0,mu1)-based
// constants collapse to zero, which keeps every bound valid but vacuous.

#include <array>
#include <cmath>
#include <stdexcept>

namespace gsgf {

struct ConstitutiveLaw {
  double mu0;
  double mu1;
  double r;

  bool in_theorem_regime() const { return r >= 3.0; }
};

inline ConstitutiveLaw make_law(double mu0, double mu1, double r) {
  if (!(mu0 > 0.0)) throw std::invalid_argument("law: mu0 must be positive");
  if (!(mu1 >= 0.0)) throw std::invalid_argument("law: mu1 must be nonnegative");
  if (!(r >= 2.0)) throw std::invalid_argument("law: r must be >= 2");
  return ConstitutiveLaw{mu0, mu1, r};
}

// Effective viscosity factor (mu0 + mu1*s)^{r-2} at shear magnitude s >= 0.
inline double viscosity_factor(const ConstitutiveLaw& law, double s) {
  return std::pow(law.mu0 + law.mu1 * s, law.r - 2.0);
}

// viscosity_factor minus its zero-shear value; the implicit/explicit
// splitting integrates the mu0^{r-2} part implicitly and this remainder
// explicitly.
inline double viscosity_factor_excess(const ConstitutiveLaw& law, double s) {
  return viscosity_factor(law, s) - viscosity_factor(law, 0.0);
}

// Small dense symmetric tensor with runtime dimension 2 or 3.
struct Tensor2 {
  int d = 2;
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * d + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * d + j)]; }
};

inline Tensor2 zero_tensor(int d) {
  Tensor2 t;
  t.d = d;
  return t;
}

inline double frobenius(const Tensor2& t) {
  double s = 0.0;
  for (int i = 0; i < t.d; ++i)
    for (int j = 0; j < t.d; ++j) s += t(i, j) * t(i, j);
  return std::sqrt(s);
}

inline double tensor_dot(const Tensor2& x, const Tensor2& y) {
  double s = 0.0;
  for (int i = 0; i < x.d; ++i)
    for (int j = 0; j < x.d; ++j) s += x(i, j) * y(i, j);
  return s;
}

inline double asymmetry(const Tensor2& t) {
  double w = 0.0;
  for (int i = 0; i < t.d; ++i)
    for (int j = i + 1; j < t.d; ++j) w = std::max(w, std::abs(t(i, j) - t(j, i)));
  return w;
}

inline void require_symmetric(const Tensor2& t, const char* what) {
  if (asymmetry(t) > 1e-12) throw std::invalid_argument(std::string(what) + ": tensor is not symmetric");
}

inline Tensor2 symmetrized(const Tensor2& t) {
  Tensor2 s = t;
  for (int i = 0; i < t.d; ++i)
    for (int j = 0; j < t.d; ++j) s(i, j) = 0.5 * (t(i, j) + t(j, i));
  return s;
}

// S(D) = (mu0 + mu1*|D|)^{r-2} D. Exactly odd, S(0) = 0.
inline Tensor2 stress(const Tensor2& D, const ConstitutiveLaw& law) {
  require_symmetric(D, "stress");
  Tensor2 Ds = symmetrized(D);
  const double phi = viscosity_factor(law, frobenius(Ds));
  Tensor2 S = Ds;
  for (auto& v : S.a) v *= phi;
  return S;
}

// 4-index Jacobian dS_ij/dD_kl, flattened ((i*d+j)*d+k)*d+l.
struct Tensor4 {
  int d = 2;
  std::array<double, 81> a{};

  double& operator()(int i, int j, int k, int l) {
    return a[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)];
  }
  double operator()(int i, int j, int k, int l) const {
    return a[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)];
  }
};

// Analytic Jacobian:
//   phi(|D|) delta_ik delta_jl + (r-2) mu1 (mu0+mu1|D|)^{r-3} D_ij D_kl / |D|,
// with the rank-one term replaced by its limit 0 when |D| < 1e-300.
inline Tensor4 stress_jacobian(const Tensor2& D, const ConstitutiveLaw& law) {
  require_symmetric(D, "stress_jacobian");
  const int d = D.d;
  const double nD = frobenius(D);
  const double phi = viscosity_factor(law, nD);
  Tensor4 J;
  J.d = d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) J(i, j, i, j) = phi;
  if (nD >= 1e-300) {
    const double c = (law.r - 2.0) * law.mu1 * std::pow(law.mu0 + law.mu1 * nD, law.r - 3.0) / nD;
    // inner product first, so J(i,j,k,l) == J(k,l,i,j) holds bit for bit
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l) J(i, j, k, l) += c * (D(i, j) * D(k, l));
  }
  return J;
}

// Quadratic form J(D)[B,B], from the closed form rather than the 4-index
// tensor; both routes are compared in the tests.
inline double jacobian_quadratic_form(const Tensor2& D, const Tensor2& B, const ConstitutiveLaw& law) {
  const double nD = frobenius(D);
  const double nB2 = tensor_dot(B, B);
  double q = viscosity_factor(law, nD) * nB2;
  if (nD >= 1e-300) {
    const double db = tensor_dot(D, B);
    q += (law.r - 2.0) * law.mu1 * std::pow(law.mu0 + law.mu1 * nD, law.r - 3.0) * db * db / nD;
  }
  return q;
}

struct DerivedConstants {
  double c0;  // lower Jacobian-form constant
  double c1;  // upper Jacobian-form constant
  double c2;  // entrywise Jacobian bound constant (= c1)
  double c3;  // coercivity constant
  double c4;  // growth constant
  double c3_monotone;  // calibrated monotonicity constant, see monotonicity_margin
};

// Closed forms for this law; validated against the margin sweeps before use.
// For mu1 = 0 the min-based constants degenerate to 0 (bounds hold trivially).
inline DerivedConstants derived_constants(const ConstitutiveLaw& law) {
  const double lo = std::min(law.mu0, law.mu1);
  const double hi = std::max(law.mu0, law.mu1);
  DerivedConstants c;
  c.c0 = std::pow(lo, law.r - 2.0);
  c.c1 = (law.r - 1.0) * std::pow(hi, law.r - 2.0);
  c.c2 = c.c1;
  c.c3 = std::pow(lo, law.r - 2.0);
  c.c4 = std::pow(hi, law.r - 2.0);
  // No proof is claimed for this constant; it is calibrated so the sampled
  // monotonicity ratio stays above it (the factor 2^{2-r} absorbs the
  // worst-case alignment of |B| + |D| against |B - D|).
  c.c3_monotone = 0.5 * std::pow(lo, law.r - 2.0) * std::pow(2.0, 2.0 - law.r);
  return c;
}

// Signed slack of an inequality plus the magnitude it should be measured
// against; callers accept value >= -tol * scale.
struct Margin {
  double value;
  double scale;
};

// S(D):D - c3 (1+|D|)^{r-2} |D|^2
inline Margin coercivity_margin(const Tensor2& D, const ConstitutiveLaw& law) {
  const Tensor2 S = stress(D, law);
  const double lhs = tensor_dot(S, D);
  const double nD = frobenius(D);
  const double rhs = derived_constants(law).c3 * std::pow(1.0 + nD, law.r - 2.0) * nD * nD;
  return {lhs - rhs, std::max(std::abs(lhs), std::abs(rhs))};
}

// c4 |D| (1+|D|)^{r-2} - |S(D)|
inline Margin growth_margin(const Tensor2& D, const ConstitutiveLaw& law) {
  const double nD = frobenius(D);
  const double lhs = frobenius(stress(D, law));
  const double rhs = derived_constants(law).c4 * nD * std::pow(1.0 + nD, law.r - 2.0);
  return {rhs - lhs, std::max(std::abs(lhs), std::abs(rhs))};
}

// [S(B)-S(D)]:[B-D] - c3_monotone |B-D|^2 (1+|B|+|D|)^{r-2}
inline Margin monotonicity_margin(const Tensor2& B, const Tensor2& D, const ConstitutiveLaw& law) {
  require_symmetric(B, "monotonicity_margin");
  require_symmetric(D, "monotonicity_margin");
  const Tensor2 SB = stress(B, law);
  const Tensor2 SD = stress(D, law);
  Tensor2 dS = SB;
  Tensor2 dT = B;
  for (std::size_t i = 0; i < dS.a.size(); ++i) {
    dS.a[i] -= SD.a[i];
    dT.a[i] -= D.a[i];
  }
  const double lhs = tensor_dot(dS, dT);
  const double w = frobenius(dT);
  const double rhs = derived_constants(law).c3_monotone * w * w *
                     std::pow(1.0 + frobenius(B) + frobenius(D), law.r - 2.0);
  return {lhs - rhs, std::max(std::abs(lhs), std::abs(rhs))};
}

// c0 (1+|D|)^{r-2} |B|^2 <= J(D)[B,B] <= c1 (1+|D|)^{r-2} |B|^2
inline std::pair<Margin, Margin> jacobian_form_bounds(const Tensor2& D, const Tensor2& B,
                                                      const ConstitutiveLaw& law) {
  const double q = jacobian_quadratic_form(D, B, law);
  const DerivedConstants c = derived_constants(law);
  const double env = std::pow(1.0 + frobenius(D), law.r - 2.0) * tensor_dot(B, B);
  const double lo = c.c0 * env;
  const double hi = c.c1 * env;
  const double scale = std::max({std::abs(q), std::abs(lo), std::abs(hi)});
  return {Margin{q - lo, scale}, Margin{hi - q, scale}};
}

}  // namespace gsgf
