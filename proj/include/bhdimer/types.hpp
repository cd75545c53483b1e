#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace bhdimer {

using cplx = std::complex<double>;

/// Raised when an operation receives input outside its domain
/// (non-finite components, off-sphere states where the sphere is required,
/// zero populations, nonzero epsilon in complex-interaction routines).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a computed quantity breaks one of the library's invariants
/// (fixed-point residual, trace loss, sphere drift).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a requested dense representation would be too large.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Dimer parameters: tunnelling v, on-site asymmetry epsilon, scaled
/// interaction g = N c and scaled interaction loss k = N kappa.
struct ModelParams {
  double v = 1.0;
  double epsilon = 0.0;
  double g = 0.0;
  double k = 0.0;

  void validate() const {
    if (!std::isfinite(v) || !std::isfinite(epsilon) || !std::isfinite(g) ||
        !std::isfinite(k)) {
      throw DomainError("ModelParams: non-finite parameter");
    }
  }

  /// The complex-interaction analysis is restricted to the symmetric dimer.
  void require_symmetric(const char* where) const {
    validate();
    if (epsilon != 0.0) {
      throw DomainError(std::string(where) + ": requires epsilon == 0");
    }
  }
};

/// Mean-field Bloch vector plus per-particle norm n.
struct BlochState {
  double sx = 0.0;
  double sy = 0.0;
  double sz = 0.5;
  double n = 1.0;

  static constexpr double kSphereTolerance = 1e-12;

  /// Builds a state that must lie on the radius-1/2 sphere.
  static BlochState on_sphere(double sx, double sy, double sz, double n = 1.0) {
    BlochState s{sx, sy, sz, n};
    if (std::abs(s.radius2() - 0.25) > kSphereTolerance) {
      throw DomainError("BlochState::on_sphere: |s|^2 differs from 1/4");
    }
    return s;
  }

  /// Spherical parametrisation s = (sin t cos p, sin t sin p, cos t) / 2.
  static BlochState from_angles(double theta, double phi, double n = 1.0) {
    return {0.5 * std::sin(theta) * std::cos(phi),
            0.5 * std::sin(theta) * std::sin(phi), 0.5 * std::cos(theta), n};
  }

  /// Rescales (sx, sy, sz) onto the radius-1/2 sphere; n is untouched.
  [[nodiscard]] BlochState projected_to_sphere() const {
    const double r = std::sqrt(radius2());
    if (!(r > 0.0)) throw DomainError("BlochState: cannot project the origin");
    return {0.5 * sx / r, 0.5 * sy / r, 0.5 * sz / r, n};
  }

  [[nodiscard]] double radius2() const { return sx * sx + sy * sy + sz * sz; }

  [[nodiscard]] bool finite() const {
    return std::isfinite(sx) && std::isfinite(sy) && std::isfinite(sz) &&
           std::isfinite(n);
  }

  /// Euclidean distance in the (sx, sy, sz) components only.
  [[nodiscard]] double distance_to(const BlochState& o) const {
    return std::sqrt((sx - o.sx) * (sx - o.sx) + (sy - o.sy) * (sy - o.sy) +
                     (sz - o.sz) * (sz - o.sz));
  }
};

/// Two complex mode amplitudes.
struct SpinorState {
  cplx psi1{1.0, 0.0};
  cplx psi2{0.0, 0.0};

  [[nodiscard]] double population() const {
    return std::norm(psi1) + std::norm(psi2);
  }
  [[nodiscard]] bool finite() const {
    return std::isfinite(psi1.real()) && std::isfinite(psi1.imag()) &&
           std::isfinite(psi2.real()) && std::isfinite(psi2.imag());
  }
};

/// Time derivative of a BlochState.
struct Derivative {
  double dsx = 0.0;
  double dsy = 0.0;
  double dsz = 0.0;
  double dn = 0.0;

  [[nodiscard]] double sphere_norm() const {
    return std::sqrt(dsx * dsx + dsy * dsy + dsz * dsz);
  }
};

/// Right-hand side of a spinor equation written as i d(psi)/dt.
struct SpinorDerivative {
  cplx i_dpsi1;
  cplx i_dpsi2;

  /// d(psi)/dt = -i * (i d(psi)/dt).
  [[nodiscard]] SpinorState time_derivative() const {
    const cplx minus_i{0.0, -1.0};
    return {minus_i * i_dpsi1, minus_i * i_dpsi2};
  }
};

}  // namespace bhdimer
