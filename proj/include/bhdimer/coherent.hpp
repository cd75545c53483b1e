#pragma once

// SU(2) coherent states of N bosons in two modes, the Schwinger angular
// momentum operators in the Fock basis, and closed-form coherent-state
// moments.
//
// Fock basis convention (project-wide): index i holds |n1, n2> with
// n1 = N - i, n2 = i, so |N, 0> comes first.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bhdimer/types.hpp"

namespace bhdimer {

/// Largest N for which dense operator representations are built.
inline constexpr int kMaxDenseN = 2000;

struct CoherentAngles {
  double theta = 0.0;
  double phi = 0.0;

  /// gamma = e^{i phi} tan(theta/2); infinite at the south pole.
  [[nodiscard]] cplx gamma() const {
    return std::polar(std::tan(0.5 * theta), phi);
  }
  [[nodiscard]] bool south_pole() const { return theta == std::numbers::pi; }

  void validate() const {
    if (!std::isfinite(theta) || !std::isfinite(phi) || theta < 0.0 || theta > std::numbers::pi) {
      throw DomainError("CoherentAngles: theta must lie in [0, pi]");
    }
  }
};

struct FockVector {
  int N = 0;
  Eigen::VectorXcd amplitudes;

  FockVector() = default;
  FockVector(int n, Eigen::VectorXcd amps) : N(n), amplitudes(std::move(amps)) {
    if (N < 0 || amplitudes.size() != N + 1) {
      throw DomainError("FockVector: amplitude count must be N + 1");
    }
  }

  /// Basis state |n1, N - n1>.
  static FockVector basis(int n, int n1) {
    if (n1 < 0 || n1 > n) throw DomainError("FockVector::basis: n1 out of range");
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n + 1);
    a[n - n1] = 1.0;
    return {n, std::move(a)};
  }

  [[nodiscard]] double norm2() const { return amplitudes.squaredNorm(); }
  [[nodiscard]] bool finite() const { return amplitudes.allFinite(); }
  [[nodiscard]] int n1(Eigen::Index i) const { return N - static_cast<int>(i); }
};

namespace detail {

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline void require_particles(int N, const char* where) {
  if (N < 0) throw DomainError(std::string(where) + ": N must be non-negative");
}

inline void require_dense(int N, const char* where) {
  require_particles(N, where);
  if (N > kMaxDenseN) {
    throw SizeError(std::string(where) + ": N exceeds the dense limit");
  }
}

}  // namespace detail

/// Condensed state (psi1 a1^dag + psi2 a2^dag)^N |0> / sqrt(N!) with
/// psi1 = e^{-i phi} cos(theta/2), psi2 = sin(theta/2). The amplitude of
/// |n1, N - n1> is sqrt(binom(N, n1)) psi1^n1 psi2^(N - n1).
inline FockVector coherent_fock(int N, const CoherentAngles& angles) {
  detail::require_particles(N, "coherent_fock");
  angles.validate();
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(N + 1);
  if (angles.south_pole()) {
    a[N] = 1.0;
    return {N, std::move(a)};
  }
  const double c = std::cos(0.5 * angles.theta);
  const double s = std::sin(0.5 * angles.theta);
  if (s == 0.0) {
    a[0] = 1.0;
    return {N, std::move(a)};
  }
  const double log_c = std::log(c), log_s = std::log(s);
  for (int i = 0; i <= N; ++i) {
    const int n1 = N - i;
    double mag = 0.0;
    if (N > 500) {
      mag = std::exp(0.5 * detail::log_binomial(N, n1) + n1 * log_c + i * log_s);
    } else {
      mag = std::sqrt(std::exp(detail::log_binomial(N, n1))) * std::pow(c, n1) *
            std::pow(s, i);
    }
    a[i] = std::polar(mag, -angles.phi * n1);
  }
  a /= a.norm();
  return {N, std::move(a)};
}

struct AngularMomentum {
  Eigen::MatrixXcd Lx, Ly, Lz;
};

/// Dense Schwinger operators Lx = (a1^dag a2 + a2^dag a1)/2,
/// Ly = (a1^dag a2 - a2^dag a1)/(2i), Lz = (n1 - n2)/2.
inline AngularMomentum angular_momentum_matrices(int N) {
  detail::require_dense(N, "angular_momentum_matrices");
  const Eigen::Index d = N + 1;
  AngularMomentum L{Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXcd::Zero(d, d),
                    Eigen::MatrixXcd::Zero(d, d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    L.Lz(i, i) = 0.5 * (N - 2.0 * static_cast<double>(i));
    if (i > 0) {
      // a1^dag a2 |N-i, i> = sqrt((N-i+1) i) |N-i+1, i-1>
      const double r = std::sqrt(static_cast<double>(N - i + 1) * static_cast<double>(i));
      L.Lx(i - 1, i) = 0.5 * r;
      L.Lx(i, i - 1) = 0.5 * r;
      L.Ly(i - 1, i) = cplx{0.0, -0.5 * r};
      L.Ly(i, i - 1) = cplx{0.0, 0.5 * r};
    }
  }
  return L;
}

enum class Axis { X, Y, Z };

inline const char* to_string(Axis a) {
  return a == Axis::X ? "x" : a == Axis::Y ? "y" : "z";
}

namespace detail {

inline double component(const BlochState& s, Axis a) {
  return a == Axis::X ? s.sx : a == Axis::Y ? s.sy : s.sz;
}

inline void require_closed_form_inputs(const BlochState& s, int N, const char* where) {
  if (N < 1) throw DomainError(std::string(where) + ": requires N >= 1");
  if (!s.finite() || std::abs(s.radius2() - 0.25) > 1e-10) {
    throw DomainError(std::string(where) + ": state must lie on the Bloch sphere");
  }
}

}  // namespace detail

/// <{Li, Lj}> = 2(1 - 1/N) <Li><Lj> + delta_ij N/2 with <Li> = N s_i.
inline double anticommutator_expectation_closed(Axis i, Axis j, const BlochState& s,
                                                int N) {
  detail::require_closed_form_inputs(s, N, "anticommutator_expectation_closed");
  const double n = N;
  const double value =
      2.0 * (1.0 - 1.0 / n) * n * n * detail::component(s, i) * detail::component(s, j);
  return i == j ? value + 0.5 * n : value;
}

/// Covariance <(Li Lz^2 + Lz^2 Li)/2> - <Li><Lz^2>
///   = -(2/N)(1 - 1/N) <Li><Lz>^2 + delta_iz (N/2)(1 - 1/N) <Lz>.
inline double covariance_LiLz2_closed(Axis i, const BlochState& s, int N) {
  detail::require_closed_form_inputs(s, N, "covariance_LiLz2_closed");
  const double n = N;
  const double li = n * detail::component(s, i), lz = n * s.sz;
  double value = -(2.0 / n) * (1.0 - 1.0 / n) * li * lz * lz;
  if (i == Axis::Z) value += 0.5 * n * (1.0 - 1.0 / n) * lz;
  return value;
}

/// N^2 is a scalar on fixed-N states, so its covariance with any Li vanishes.
inline double covariance_LiN2_closed(Axis /*i*/, const BlochState& s, int N) {
  detail::require_closed_form_inputs(s, N, "covariance_LiN2_closed");
  return 0.0;
}

enum class ThirdMoment { Lz3, Lz2Lx, Lz2Ly };

inline const char* to_string(ThirdMoment m) {
  switch (m) {
    case ThirdMoment::Lz3: return "Lz3";
    case ThirdMoment::Lz2Lx: return "Lz2Lx";
    case ThirdMoment::Lz2Ly: return "Lz2Ly";
  }
  return "?";
}

/// Coherent-state third moments <Lz^3>, <Lz^2 Lx>, <Lz^2 Ly>.
inline cplx third_moment_closed(ThirdMoment kind, const BlochState& s, int N) {
  detail::require_closed_form_inputs(s, N, "third_moment_closed");
  const double n = N;
  const double lead = n * n * n * (1.0 - 3.0 / n + 2.0 / (n * n));
  const double cross = n * n * (1.0 - 1.0 / n);
  switch (kind) {
    case ThirdMoment::Lz3:
      return {lead * s.sz * s.sz * s.sz + n * n * (0.75 - 0.5 / n) * s.sz, 0.0};
    case ThirdMoment::Lz2Lx:
      return {lead * s.sx * s.sz * s.sz + 0.25 * n * n * s.sx, cross * s.sy * s.sz};
    case ThirdMoment::Lz2Ly:
      return {lead * s.sy * s.sz * s.sz + 0.25 * n * n * s.sy, -cross * s.sx * s.sz};
  }
  throw DomainError("third_moment_closed: unknown kind");
}

/// Factors accepted by fock_oracle_expectation.
enum class Observable { Lx, Ly, Lz, N };

/// Applies one of Lx, Ly, Lz, N to a Fock vector through the ladder actions
/// a1^dag a2 and a2^dag a1.
inline Eigen::VectorXcd apply_observable(Observable op, const FockVector& psi) {
  const int N = psi.N;
  const Eigen::Index d = N + 1;
  const Eigen::VectorXcd& a = psi.amplitudes;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
  switch (op) {
    case Observable::N:
      return static_cast<double>(N) * a;
    case Observable::Lz:
      for (Eigen::Index i = 0; i < d; ++i) out[i] = 0.5 * (N - 2.0 * double(i)) * a[i];
      return out;
    case Observable::Lx:
    case Observable::Ly: {
      Eigen::VectorXcd raise = Eigen::VectorXcd::Zero(d), lower = Eigen::VectorXcd::Zero(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double n1 = N - double(i), n2 = double(i);
        // a1^dag a2: |n1, n2> -> sqrt((n1+1) n2) |n1+1, n2-1>
        if (i > 0) raise[i - 1] += std::sqrt((n1 + 1.0) * n2) * a[i];
        // a2^dag a1: |n1, n2> -> sqrt(n1 (n2+1)) |n1-1, n2+1>
        if (i + 1 < d) lower[i + 1] += std::sqrt(n1 * (n2 + 1.0)) * a[i];
      }
      if (op == Observable::Lx) return 0.5 * (raise + lower);
      return cplx{0.0, -0.5} * (raise - lower);
    }
  }
  return out;
}

/// <psi| O_1 O_2 ... O_m |psi> / <psi|psi> for the ordered product given.
inline cplx fock_oracle_expectation(std::span<const Observable> product,
                                    const FockVector& psi) {
  detail::require_dense(psi.N, "fock_oracle_expectation");
  const double n2 = psi.norm2();
  if (!(n2 > 0.0)) throw DomainError("fock_oracle_expectation: zero vector");
  FockVector work = psi;
  for (auto it = product.rbegin(); it != product.rend(); ++it) {
    work.amplitudes = apply_observable(*it, work);
  }
  return psi.amplitudes.dot(work.amplitudes) / n2;
}

inline cplx fock_oracle_expectation(std::initializer_list<Observable> product,
                                    const FockVector& psi) {
  return fock_oracle_expectation(std::span<const Observable>(product.begin(), product.size()),
                                 psi);
}

}  // namespace bhdimer
