#pragma once

// Finite-N dimer with complex interaction c - i kappa: non-Hermitian
// Schroedinger evolution in the fixed-N Fock space.
//
// H = 2 eps Lz + 2 v Lx + 2(c - i kappa) Lz^2 + (c - i kappa) N^2 / 2.
// The last term is a scalar on the sector. Its phase is dropped and its decay
// exp(-kappa N^2 t) of <Psi|Psi> is kept analytically in a log-norm ledger.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bhdimer/coherent.hpp"
#include "bhdimer/integrator.hpp"
#include "bhdimer/types.hpp"

namespace bhdimer {

struct ManyBodyParams {
  int N = 1;
  double v = 1.0;
  double epsilon = 0.0;
  /// Interaction per pair, c = g / N.
  double c = 0.0;
  /// Interaction loss per pair, kappa = k / N.
  double kappa = 0.0;

  static ManyBodyParams from_scaled(int N, const ModelParams& p) {
    if (N < 1) throw DomainError("ManyBodyParams: requires N >= 1");
    p.validate();
    return {N, p.v, p.epsilon, p.g / N, p.k / N};
  }

  [[nodiscard]] double g() const { return N * c; }
  [[nodiscard]] double k() const { return N * kappa; }
  [[nodiscard]] ModelParams scaled() const { return {v, epsilon, g(), k()}; }

  void validate() const {
    if (N < 1) throw DomainError("ManyBodyParams: requires N >= 1");
    scaled().validate();
  }
};

/// Dense matrix part of the Hamiltonian (scalar term excluded). With
/// complex_interaction the Lz^2 coefficient is 2(c - i kappa) and epsilon
/// must vanish; otherwise kappa is ignored and the matrix is Hermitian.
inline Eigen::MatrixXcd build_hamiltonian(const ManyBodyParams& p,
                                          bool complex_interaction) {
  p.validate();
  if (complex_interaction && p.epsilon != 0.0) {
    throw DomainError("build_hamiltonian: complex interaction requires epsilon == 0");
  }
  const AngularMomentum L = angular_momentum_matrices(p.N);
  const cplx coupling{p.c, complex_interaction ? -p.kappa : 0.0};
  return 2.0 * p.epsilon * L.Lz + 2.0 * p.v * L.Lx + 2.0 * coupling * (L.Lz * L.Lz);
}

/// Scalar term (c - i kappa) N^2 / 2 that build_hamiltonian leaves out.
inline cplx hamiltonian_scalar(const ManyBodyParams& p, bool complex_interaction) {
  const double n = p.N;
  return cplx{p.c, complex_interaction ? -p.kappa : 0.0} * (0.5 * n * n);
}

/// Tridiagonal form of the matrix part, used for matrix-free evolution.
struct TridiagonalHamiltonian {
  Eigen::VectorXcd diagonal;
  /// off[i] couples index i and i + 1 (real, symmetric).
  Eigen::VectorXd off;

  explicit TridiagonalHamiltonian(const ManyBodyParams& p, bool complex_interaction) {
    p.validate();
    if (complex_interaction && p.epsilon != 0.0) {
      throw DomainError("TridiagonalHamiltonian: complex interaction requires epsilon == 0");
    }
    const int N = p.N;
    const cplx coupling{p.c, complex_interaction ? -p.kappa : 0.0};
    diagonal.resize(N + 1);
    off.resize(N);
    for (int i = 0; i <= N; ++i) {
      const double lz = 0.5 * (N - 2.0 * i);
      diagonal[i] = 2.0 * p.epsilon * lz + 2.0 * coupling * lz * lz;
      if (i < N) off[i] = p.v * std::sqrt(double(N - i) * double(i + 1));
    }
  }

  [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    const Eigen::Index n = diagonal.size();
    Eigen::VectorXcd y = diagonal.cwiseProduct(x);
    if (n > 1) {
      y.head(n - 1) += off.cwiseProduct(x.tail(n - 1));
      y.tail(n - 1) += off.cwiseProduct(x.head(n - 1));
    }
    return y;
  }
};

/// Normalised state plus ln<Psi|Psi> of the unnormalised solution.
struct LedgeredState {
  FockVector unit;
  double log_norm = 0.0;
};

struct NonHermitianTrajectory {
  std::vector<double> times;
  std::vector<FockVector> states;
  /// ln<Psi|Psi>(t), scalar term included.
  std::vector<double> log_norm;
};

namespace detail {

inline bool is_complex(const ManyBodyParams& p) { return p.kappa != 0.0; }

inline void require_normalised(const FockVector& psi, const char* where) {
  if (!psi.finite() || std::abs(psi.norm2() - 1.0) > 1e-8) {
    throw DomainError(std::string(where) + ": initial state must be normalised");
  }
}

/// Core stepping loop. obs(t, unit_state, log_norm) is called at t0 and after
/// every accepted step.
template <class Observer>
LedgeredState evolve_ledgered(const LedgeredState& start, const ManyBodyParams& p,
                              double duration, const IntegratorConfig& cfg,
                              Observer&& obs) {
  const bool cplx_h = is_complex(p);
  const TridiagonalHamiltonian H(p, cplx_h);
  const double scalar_rate = cplx_h ? -p.kappa * double(p.N) * double(p.N) : 0.0;
  auto rhs = [&H](double, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    return cplx{0.0, -1.0} * H.apply(y);
  };
  double t = 0.0;
  double ledger = start.log_norm;
  Eigen::VectorXcd y = start.unit.amplitudes;
  obs(0.0, start.unit, start.log_norm);
  try {
    solve_ode(rhs, t, y, duration, cfg, [&](double tt, Eigen::VectorXcd& yy) {
      const double n2 = yy.squaredNorm();
      if (!(n2 > 0.0)) throw IntegrationError("evolve_nonhermitian: state vanished", tt);
      ledger += std::log(n2);
      yy /= std::sqrt(n2);
      obs(tt, FockVector(p.N, yy), ledger + scalar_rate * tt);
      return StepAction::Modified;
    });
  } catch (const IntegrationFailure<Eigen::VectorXcd>& e) {
    throw IntegrationFailure<FockVector>(e.what(), e.t_last(),
                                         FockVector(p.N, e.last_state));
  }
  return {FockVector(p.N, y), ledger + scalar_rate * duration};
}

}  // namespace detail

/// Integrates i psi' = H psi from a normalised psi0 over [0, t_end]. Stored
/// states are normalised; log_norm records ln<Psi|Psi>. At least kMinSamples
/// samples are stored.
inline NonHermitianTrajectory evolve_nonhermitian(const FockVector& psi0,
                                                  const ManyBodyParams& p, double t_end,
                                                  IntegratorConfig cfg = {}) {
  p.validate();
  if (psi0.N != p.N) throw DomainError("evolve_nonhermitian: particle number mismatch");
  detail::require_normalised(psi0, "evolve_nonhermitian");
  if (!(t_end > 0.0)) throw DomainError("evolve_nonhermitian: t_end must be positive");
  cfg.max_step = std::min(cfg.max_step, t_end / 200.0);
  NonHermitianTrajectory traj;
  detail::evolve_ledgered({psi0, 0.0}, p, t_end, cfg,
                          [&](double t, const FockVector& u, double ln) {
                            traj.times.push_back(t);
                            traj.states.push_back(u);
                            traj.log_norm.push_back(ln);
                          });
  return traj;
}

/// Evolves by duration (negative runs backward) and returns only the end.
inline LedgeredState propagate_fock(const LedgeredState& start, const ManyBodyParams& p,
                                    double duration, const IntegratorConfig& cfg = {}) {
  p.validate();
  if (start.unit.N != p.N) throw DomainError("propagate_fock: particle number mismatch");
  return detail::evolve_ledgered(start, p, duration, cfg,
                                 [](double, const FockVector&, double) {});
}

/// Bloch vector <L_i>/(N <psi|psi>) with n = exp(log_norm / N), so that
/// n^N = <Psi|Psi>.
inline BlochState mp_bloch(const FockVector& psi, double log_norm = 0.0) {
  if (psi.N < 1) throw DomainError("mp_bloch: requires N >= 1");
  const double n2 = psi.norm2();
  if (!(n2 > 0.0) || !psi.finite()) throw DomainError("mp_bloch: zero vector");
  auto mean = [&](Observable op) {
    return psi.amplitudes.dot(apply_observable(op, psi)).real() / (n2 * psi.N);
  };
  return {mean(Observable::Lx), mean(Observable::Ly), mean(Observable::Lz),
          std::exp(log_norm / psi.N)};
}

namespace detail {

/// Expectation values <A psi|B psi>/<psi|psi> helpers over a fixed state.
struct MomentTable {
  Eigen::VectorXcd psi, Lx, Ly, Lz, Lz2;
  double norm2 = 1.0;

  explicit MomentTable(const FockVector& f) : psi(f.amplitudes), norm2(f.norm2()) {
    Lx = apply_observable(Observable::Lx, f);
    Ly = apply_observable(Observable::Ly, f);
    Lz = apply_observable(Observable::Lz, f);
    Lz2 = apply_observable(Observable::Lz, FockVector(f.N, Lz));
  }
  [[nodiscard]] cplx inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const {
    return a.dot(b) / norm2;
  }
};

}  // namespace detail

/// d ln<Psi|Psi>/dt = -4 kappa (<Lz^2> + N^2/4).
inline double norm_decay_rate(const FockVector& psi, const ManyBodyParams& p) {
  const detail::MomentTable m(psi);
  const double lz2 = m.inner(m.psi, m.Lz2).real();
  return -4.0 * p.kappa * (lz2 + 0.25 * double(p.N) * double(p.N));
}

/// d<L_i>/dt of the normalised expectation values from the general law for a
/// non-Hermitian H = H0 - i Gamma:
///   d<A>/dt = -i <[A, H0]> - 2 Cov(A, Gamma),
/// Cov(A, B) = <{A, B}>/2 - <A><B>, with H0 = 2 eps Lz + 2 v Lx + 2 c Lz^2 and
/// Gamma = 2 kappa Lz^2 (the scalar part of Gamma has zero covariance).
inline std::array<double, 3> quantum_eom_rates(const FockVector& psi,
                                               const ManyBodyParams& p) {
  p.validate();
  if (psi.N != p.N) throw DomainError("quantum_eom_rates: particle number mismatch");
  const detail::MomentTable m(psi);
  const TridiagonalHamiltonian H0(p, false);
  const Eigen::VectorXcd h0 = H0.apply(m.psi);
  const Eigen::VectorXcd gamma = 2.0 * p.kappa * m.Lz2;
  const double mean_gamma = m.inner(m.psi, gamma).real();
  const std::array<const Eigen::VectorXcd*, 3> A{&m.Lx, &m.Ly, &m.Lz};
  std::array<double, 3> rates{};
  for (int i = 0; i < 3; ++i) {
    // <[A, H0]> = <A psi|H0 psi> - <H0 psi|A psi> = 2i Im<A psi|H0 psi>.
    const double comm_im = m.inner(*A[i], h0).imag();
    const double mean_a = m.inner(m.psi, *A[i]).real();
    const double cov = m.inner(*A[i], gamma).real() - mean_a * mean_gamma;
    rates[i] = 2.0 * comm_im - 2.0 * cov;
  }
  return rates;
}

/// Absolute differences between quantum_eom_rates and a five-point central
/// difference of <L_i>(t) along evolve_nonhermitian with step h.
inline std::array<double, 3> quantum_eom_residual(const FockVector& psi,
                                                  const ManyBodyParams& p,
                                                  double h = 1e-3,
                                                  IntegratorConfig cfg = {1e-13, 1e-13,
                                                                          1e-3}) {
  detail::require_normalised(psi, "quantum_eom_residual");
  const auto rates = quantum_eom_rates(psi, p);
  const LedgeredState start{psi, 0.0};
  std::array<BlochState, 4> s;
  const std::array<double, 4> offsets{-2.0 * h, -h, h, 2.0 * h};
  for (int j = 0; j < 4; ++j) s[j] = mp_bloch(propagate_fock(start, p, offsets[j], cfg).unit);
  const double n = p.N;
  auto fd = [&](double BlochState::*comp) {
    return n * (s[0].*comp - 8.0 * s[1].*comp + 8.0 * s[2].*comp - s[3].*comp) / (12.0 * h);
  };
  return {std::abs(rates[0] - fd(&BlochState::sx)), std::abs(rates[1] - fd(&BlochState::sy)),
          std::abs(rates[2] - fd(&BlochState::sz))};
}

}  // namespace bhdimer
