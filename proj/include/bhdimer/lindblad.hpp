#pragma once

// Lindblad evolution with two-particle loss, jump operators a1^2 and a2^2:
//   rho' = -i[H, rho] + kappa sum_j (a_j^2 rho a_j^dag2 - {a_j^dag2 a_j^2, rho}/2)
// with the Hermitian dimer Hamiltonian H. The loss couples the sector with M
// particles only to the sector with M - 2, so a state that starts with a
// fixed particle number stays block diagonal over sectors N0, N0 - 2, ...

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bhdimer/coherent.hpp"
#include "bhdimer/integrator.hpp"
#include "bhdimer/manybody.hpp"

namespace bhdimer {

/// Largest initial particle number accepted by the Lindblad solver.
inline constexpr int kMaxLindbladN = 60;

/// Block-diagonal density operator. blocks[m] is the sector with
/// M = N0 - 2m particles, a (M + 1) x (M + 1) matrix in the Fock basis.
struct DensityOperator {
  int N0 = 0;
  std::vector<Eigen::MatrixXcd> blocks;

  static int sector_count(int n0) { return n0 / 2 + 1; }
  [[nodiscard]] int particles(std::size_t m) const { return N0 - 2 * static_cast<int>(m); }

  static DensityOperator zero(int n0) {
    DensityOperator rho;
    rho.N0 = n0;
    for (int m = 0; m < sector_count(n0); ++m) {
      const int M = n0 - 2 * m;
      rho.blocks.push_back(Eigen::MatrixXcd::Zero(M + 1, M + 1));
    }
    return rho;
  }

  /// |psi><psi| / <psi|psi> in the top sector.
  static DensityOperator pure(const FockVector& psi) {
    if (psi.N < 0 || psi.N > kMaxLindbladN) {
      throw SizeError("DensityOperator: N0 outside [0, 60]");
    }
    const double n2 = psi.norm2();
    if (!(n2 > 0.0)) throw DomainError("DensityOperator: zero vector");
    DensityOperator rho = zero(psi.N);
    rho.blocks[0] = psi.amplitudes * psi.amplitudes.adjoint() / n2;
    return rho;
  }

  [[nodiscard]] double trace() const {
    double t = 0.0;
    for (const auto& b : blocks) t += b.trace().real();
    return t;
  }

  [[nodiscard]] double hermiticity_error() const {
    double worst = 0.0;
    for (const auto& b : blocks) worst = std::max(worst, (b - b.adjoint()).cwiseAbs().maxCoeff());
    return worst;
  }

  /// Smallest eigenvalue over all sector blocks (Hermitian part).
  [[nodiscard]] double min_eigenvalue() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) {
      const Eigen::MatrixXcd h = 0.5 * (b + b.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
      lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    return lo;
  }

  [[nodiscard]] std::size_t packed_size() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += static_cast<std::size_t>(b.size());
    return s;
  }

  [[nodiscard]] Eigen::VectorXcd pack() const {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(packed_size()));
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
      v.segment(off, b.size()) = Eigen::Map<const Eigen::VectorXcd>(b.data(), b.size());
      off += b.size();
    }
    return v;
  }

  void unpack(const Eigen::VectorXcd& v) {
    Eigen::Index off = 0;
    for (auto& b : blocks) {
      b = Eigen::Map<const Eigen::MatrixXcd>(v.data() + off, b.rows(), b.cols());
      off += b.size();
    }
  }
};

/// Precomputed sector data for lindblad_rhs. The Hamiltonian uses the real
/// interaction c = g / N0 and ignores the scalar term, which commutes.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const ManyBodyParams& p) : p_(p) {
    p.validate();
    if (p.N > kMaxLindbladN) throw SizeError("LindbladGenerator: N0 above 60");
    if (p.kappa < 0.0) throw DomainError("LindbladGenerator: kappa must be non-negative");
    for (int m = 0; m < DensityOperator::sector_count(p.N); ++m) {
      const int M = p.N - 2 * m;
      ManyBodyParams sector = p;
      sector.N = std::max(M, 1);
      Sector s;
      if (M == 0) {
        s.H = Eigen::MatrixXcd::Zero(1, 1);
      } else {
        const TridiagonalHamiltonian tri(sector, false);
        s.H = Eigen::MatrixXcd::Zero(M + 1, M + 1);
        s.H.diagonal() = tri.diagonal;
        for (int i = 0; i < M; ++i) {
          s.H(i, i + 1) = tri.off[i];
          s.H(i + 1, i) = tri.off[i];
        }
      }
      s.loss = Eigen::VectorXd(M + 1);
      for (int i = 0; i <= M; ++i) {
        const double n1 = M - i, n2 = i;
        s.loss[i] = n1 * (n1 - 1.0) + n2 * (n2 - 1.0);
      }
      // Gains from sector M + 2: a1^2 keeps index i, a2^2 maps i + 2 -> i.
      if (m > 0) {
        const int Mp = M + 2;
        s.gain1 = Eigen::VectorXd(M + 1);
        s.gain2 = Eigen::VectorXd(M + 1);
        for (int i = 0; i <= M; ++i) {
          const double n1 = Mp - i;  // source |Mp - i, i>
          s.gain1[i] = std::sqrt(n1 * (n1 - 1.0));
          const double n2 = i + 2;  // source |Mp - i - 2, i + 2>
          s.gain2[i] = std::sqrt(n2 * (n2 - 1.0));
        }
      }
      sectors_.push_back(std::move(s));
    }
  }

  [[nodiscard]] const ManyBodyParams& params() const { return p_; }

  /// Derivative of rho, block by block.
  void apply(const DensityOperator& rho, DensityOperator& out) const {
    const cplx minus_i{0.0, -1.0};
    for (std::size_t m = 0; m < sectors_.size(); ++m) {
      const Sector& s = sectors_[m];
      const Eigen::MatrixXcd& r = rho.blocks[m];
      Eigen::MatrixXcd& d = out.blocks[m];
      const Eigen::MatrixXcd hr = s.H * r;
      d.noalias() = minus_i * (hr - hr.adjoint());
      d -= (0.5 * p_.kappa) * (s.loss.asDiagonal() * r + r * s.loss.asDiagonal());
      if (m > 0) {
        const Eigen::MatrixXcd& up = rho.blocks[m - 1];
        const Eigen::Index n = r.rows();
        d += p_.kappa * (s.gain1.asDiagonal() * up.topLeftCorner(n, n) * s.gain1.asDiagonal());
        d += p_.kappa *
             (s.gain2.asDiagonal() * up.bottomRightCorner(n, n) * s.gain2.asDiagonal());
      }
    }
  }

 private:
  struct Sector {
    Eigen::MatrixXcd H;
    Eigen::VectorXd loss;
    Eigen::VectorXd gain1, gain2;
  };
  ManyBodyParams p_;
  std::vector<Sector> sectors_;
};

/// rho' for the two-particle-loss master equation. p.N is the initial
/// particle number N0 and fixes c = g / N0, kappa = k / N0.
inline DensityOperator lindblad_rhs(const DensityOperator& rho, const ManyBodyParams& p) {
  if (rho.N0 != p.N) throw DomainError("lindblad_rhs: particle number mismatch");
  const LindbladGenerator gen(p);
  DensityOperator out = DensityOperator::zero(rho.N0);
  gen.apply(rho, out);
  return out;
}

struct LindbladObservables {
  double Lx = 0.0, Ly = 0.0, Lz = 0.0;
  double N = 0.0, N2 = 0.0, Lz2 = 0.0;
  double trace = 0.0;
};

/// Tr(O rho) summed over sectors.
inline LindbladObservables lindblad_observables(const DensityOperator& rho) {
  LindbladObservables o;
  for (std::size_t m = 0; m < rho.blocks.size(); ++m) {
    const Eigen::MatrixXcd& b = rho.blocks[m];
    const int M = rho.particles(m);
    const double tr = b.trace().real();
    o.trace += tr;
    o.N += M * tr;
    o.N2 += double(M) * M * tr;
    for (int i = 0; i <= M; ++i) {
      const double lz = 0.5 * (M - 2.0 * i);
      o.Lz += lz * b(i, i).real();
      o.Lz2 += lz * lz * b(i, i).real();
      if (i > 0) {
        // Tr(L+ rho) with L+ = a1^dag a2 having entry (i-1, i).
        const double r = std::sqrt(double(M - i + 1) * double(i));
        const cplx lp = r * b(i, i - 1);
        o.Lx += lp.real();
        o.Ly += lp.imag();
      }
    }
  }
  return o;
}

/// d<N>/dt = -2 kappa (<N^2>/2 + 2<Lz^2> - <N>).
inline double particle_number_rate(const LindbladObservables& o, const ManyBodyParams& p) {
  return -2.0 * p.kappa * (0.5 * o.N2 + 2.0 * o.Lz2 - o.N);
}

/// Mean-field view of the observables: s_i = <L_i>/N0 and n = <N>/N0, the
/// state variables of lb_mf_rhs.
inline BlochState lindblad_bloch(const LindbladObservables& o, int N0) {
  const double n0 = N0;
  return {o.Lx / n0, o.Ly / n0, o.Lz / n0, o.N / n0};
}

/// Integrates the master equation over [0, t_end]. obs(t, rho) is called at
/// t = 0 and after every accepted step; returning false stops the run.
template <class Observer>
DensityOperator evolve_lindblad(const DensityOperator& rho0, const ManyBodyParams& p,
                                double t_end, const IntegratorConfig& cfg, Observer&& obs) {
  if (rho0.N0 != p.N) throw DomainError("evolve_lindblad: particle number mismatch");
  if (!(t_end > 0.0)) throw DomainError("evolve_lindblad: t_end must be positive");
  const LindbladGenerator gen(p);
  DensityOperator work = DensityOperator::zero(rho0.N0);
  DensityOperator deriv = DensityOperator::zero(rho0.N0);
  auto rhs = [&](double, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    work.unpack(y);
    gen.apply(work, deriv);
    return deriv.pack();
  };
  DensityOperator rho = rho0;
  if (!obs(0.0, static_cast<const DensityOperator&>(rho))) return rho;
  double t = 0.0;
  Eigen::VectorXcd y = rho0.pack();
  solve_ode(rhs, t, y, t_end, cfg, [&](double tt, Eigen::VectorXcd& yy) {
    rho.unpack(yy);
    return obs(tt, static_cast<const DensityOperator&>(rho)) ? StepAction::Continue
                                                              : StepAction::Stop;
  });
  rho.unpack(y);
  return rho;
}

inline DensityOperator evolve_lindblad(const DensityOperator& rho0, const ManyBodyParams& p,
                                       double t_end, const IntegratorConfig& cfg = {}) {
  return evolve_lindblad(rho0, p, t_end, cfg, [](double, const DensityOperator&) { return true; });
}

}  // namespace bhdimer
