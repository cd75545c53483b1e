#pragma once

// Vector fields of the two-mode mean-field descriptions. Everything here is a
// pure function of its arguments; integration lives in dynamics.hpp.

#include <algorithm>
#include <cmath>
#include <complex>

#include "bhdimer/types.hpp"

namespace bhdimer {

namespace detail {

inline void require_finite(const BlochState& s, const char* where) {
  if (!s.finite()) throw DomainError(std::string(where) + ": non-finite state");
}

inline void require_finite(const SpinorState& psi, const char* where) {
  if (!psi.finite()) throw DomainError(std::string(where) + ": non-finite state");
}

}  // namespace detail

/// Dissipative Bloch equations for the dimer with complex interaction
/// g - i k (epsilon = 0), together with the per-particle norm law
/// n' = -4k (sz^2 + 1/4) n.
inline Derivative mf_rhs_complex_interaction(const BlochState& s,
                                             const ModelParams& p) {
  p.require_symmetric("mf_rhs_complex_interaction");
  detail::require_finite(s, "mf_rhs_complex_interaction");
  const double sz2 = s.sz * s.sz;
  return {-4.0 * p.g * s.sy * s.sz + 8.0 * p.k * s.sx * sz2,
          4.0 * p.g * s.sx * s.sz - 2.0 * p.v * s.sz + 8.0 * p.k * s.sy * sz2,
          2.0 * p.v * s.sy - 2.0 * p.k * s.sz * (1.0 - 4.0 * sz2),
          -4.0 * p.k * (sz2 + 0.25) * s.n};
}

/// Hermitian mean-field Bloch equations (real interaction, any epsilon).
/// The norm is conserved.
inline Derivative mf_rhs_hermitian(const BlochState& s, const ModelParams& p) {
  p.validate();
  detail::require_finite(s, "mf_rhs_hermitian");
  return {-2.0 * p.epsilon * s.sy - 4.0 * p.g * s.sy * s.sz,
          2.0 * p.epsilon * s.sx + 4.0 * p.g * s.sx * s.sz - 2.0 * p.v * s.sz,
          2.0 * p.v * s.sy, 0.0};
}

/// Mean-field limit of the Lindblad dynamics with two-particle loss. The Bloch
/// vector lives on the shrinking sphere |s|^2 = n^2/4.
inline Derivative lb_mf_rhs(const BlochState& s, const ModelParams& p) {
  p.require_symmetric("lb_mf_rhs");
  detail::require_finite(s, "lb_mf_rhs");
  if (!(s.n > 0.0)) throw DomainError("lb_mf_rhs: requires n > 0");
  const double kn = p.k * s.n;
  return {-4.0 * p.g * s.sy * s.sz - kn * s.sx,
          4.0 * p.g * s.sx * s.sz - 2.0 * p.v * s.sz - kn * s.sy,
          2.0 * p.v * s.sy - 2.0 * kn * s.sz,
          -2.0 * p.k * (0.5 * s.n * s.n + 2.0 * s.sz * s.sz)};
}

/// Complex nonlinear Schroedinger equation equivalent to
/// mf_rhs_complex_interaction. The nonlinearity only depends on population
/// ratios, so the direction of psi evolves independently of its norm.
inline SpinorDerivative nlse_rhs_complex_interaction(const SpinorState& psi,
                                                     const ModelParams& p) {
  p.require_symmetric("nlse_rhs_complex_interaction");
  detail::require_finite(psi, "nlse_rhs_complex_interaction");
  const double a1 = std::norm(psi.psi1);
  const double a2 = std::norm(psi.psi2);
  const double total = a1 + a2;
  if (!(total > 0.0)) {
    throw DomainError("nlse_rhs_complex_interaction: zero total population");
  }
  const cplx gk{p.g, -p.k};
  const cplx shared = cplx{0.0, p.k} * ((a1 * a1 + a2 * a2) / (total * total));
  const cplx w1 = 2.0 * gk * (a1 / total) + shared;
  const cplx w2 = 2.0 * gk * (a2 / total) + shared;
  return {w1 * psi.psi1 + p.v * psi.psi2, p.v * psi.psi1 + w2 * psi.psi2};
}

/// Gross-Pitaevskii form. With complex_g == false this is the Hermitian
/// two-mode GPE, i psi1' = (eps + 2g|psi1|^2) psi1 + v psi2. With
/// complex_g == true the interaction becomes (2g - i k)|psi_j|^2 (eps = 0),
/// the mean-field limit of two-particle-loss Lindblad dynamics.
inline SpinorDerivative nlse_rhs_gpe(const SpinorState& psi,
                                     const ModelParams& p, bool complex_g) {
  detail::require_finite(psi, "nlse_rhs_gpe");
  if (complex_g) {
    p.require_symmetric("nlse_rhs_gpe");
  } else {
    p.validate();
  }
  const cplx coupling{2.0 * p.g, complex_g ? -p.k : 0.0};
  const cplx w1 = p.epsilon + coupling * std::norm(psi.psi1);
  const cplx w2 = -p.epsilon + coupling * std::norm(psi.psi2);
  return {w1 * psi.psi1 + p.v * psi.psi2, p.v * psi.psi1 + w2 * psi.psi2};
}

/// How spinor components are mapped onto the Bloch ball.
enum class BlochScaling {
  /// s = (Re, Im of psi1* psi2, (|psi1|^2-|psi2|^2)/2) / n: always on the
  /// radius-1/2 sphere. Pairs with the complex-interaction NLSE.
  PerParticle,
  /// Raw components on the radius n/2 sphere. Pairs with the complex GPE.
  Population,
};

/// Schwinger map from mode amplitudes to the Bloch vector; n is the total
/// population |psi1|^2 + |psi2|^2.
inline BlochState bloch_from_spinor(const SpinorState& psi,
                                    BlochScaling scaling = BlochScaling::PerParticle) {
  const cplx cross = std::conj(psi.psi1) * psi.psi2;
  const double n = psi.population();
  BlochState s{cross.real(), cross.imag(),
               0.5 * (std::norm(psi.psi1) - std::norm(psi.psi2)), n};
  if (scaling == BlochScaling::PerParticle && n > 0.0) {
    s.sx /= n;
    s.sy /= n;
    s.sz /= n;
  }
  return s;
}

/// Inverse of bloch_from_spinor (PerParticle) up to a global phase: psi1 =
/// sqrt(n) e^{-i phi} cos(theta/2), psi2 = sqrt(n) sin(theta/2).
inline SpinorState spinor_from_bloch(const BlochState& s) {
  const double r = std::sqrt(s.radius2());
  if (!(r > 0.0) || !(s.n > 0.0)) {
    throw DomainError("spinor_from_bloch: degenerate Bloch vector");
  }
  const double theta = std::acos(std::clamp(s.sz / r, -1.0, 1.0));
  const double phi = std::atan2(s.sy, s.sx);
  const double amp = std::sqrt(s.n);
  return {std::polar(amp * std::cos(0.5 * theta), -phi),
          cplx{amp * std::sin(0.5 * theta), 0.0}};
}

/// Conserved energy of the Hermitian field, 2 eps sz + 2 v sx + 2 g sz^2.
inline double hermitian_energy(const BlochState& s, const ModelParams& p) {
  return 2.0 * p.epsilon * s.sz + 2.0 * p.v * s.sx + 2.0 * p.g * s.sz * s.sz;
}

/// d|s|^2/dt for the complex-interaction field off the sphere.
inline double sphere_drift_rate(const BlochState& s, const ModelParams& p) {
  return -16.0 * p.k * s.sz * s.sz * (0.25 - s.radius2());
}

}  // namespace bhdimer
