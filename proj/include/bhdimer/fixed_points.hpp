#pragma once

// Stationary states of the complex-interaction Bloch flow (v = 1, eps = 0),
// the parameter-plane regions in which they exist, their stability on the
// sphere, and the unstable limit cycle of region 1.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bhdimer/core.hpp"
#include "bhdimer/dynamics.hpp"
#include "bhdimer/integrator.hpp"

namespace bhdimer {

enum class RegionId { Region1, Region2, Region3, Boundary };

/// Numeric tag used in region maps: 1, 2, 3 for the regions, 0 for Boundary.
inline int region_number(RegionId r) {
  switch (r) {
    case RegionId::Region1: return 1;
    case RegionId::Region2: return 2;
    case RegionId::Region3: return 3;
    case RegionId::Boundary: return 0;
  }
  return -1;
}

inline const char* to_string(RegionId r) {
  switch (r) {
    case RegionId::Region1: return "region1";
    case RegionId::Region2: return "region2";
    case RegionId::Region3: return "region3";
    case RegionId::Boundary: return "boundary";
  }
  return "?";
}

inline constexpr double kRegionBoundaryTolerance = 1e-12;

/// P_k(g) = g^4 + k^4 + 2 g^2 k^2 - 4 k^2 and the roots y_+- = sz^2 of the
/// fixed-point biquadratic -g^2 + 1 + 4(g^2 - k^2) y + 16 k^2 y^2 = 0.
struct DiscriminantReport {
  double P = 0.0;
  std::optional<double> y_plus;
  std::optional<double> y_minus;
};

inline double discriminant_value(double g, double k) {
  const double g2 = g * g, k2 = k * k;
  return g2 * g2 + k2 * k2 + 2.0 * g2 * k2 - 4.0 * k2;
}

/// Left-hand side of the fixed-point biquadratic in y = sz^2.
inline double biquadratic(double g, double k, double y) {
  return -g * g + 1.0 + 4.0 * g * g * y - 4.0 * k * k * y + 16.0 * k * k * y * y;
}

/// At k = 0 the biquadratic is linear in y and its only root
/// (g^2 - 1)/(4 g^2), the Hermitian self-trapping state, is reported in
/// y_plus when |g| > 1.
inline DiscriminantReport discriminant(double g, double k) {
  DiscriminantReport r;
  r.P = discriminant_value(g, k);
  if (k == 0.0) {
    if (std::abs(g) > 1.0) r.y_plus = (g * g - 1.0) / (4.0 * g * g);
    return r;
  }
  if (r.P >= 0.0) {
    const double root = std::sqrt(r.P);
    const double denom = 8.0 * k * k;
    r.y_plus = (k * k - g * g + root) / denom;
    r.y_minus = (k * k - g * g - root) / denom;
  }
  return r;
}

namespace detail {
inline void require_unit_coupling(const ModelParams& p, const char* where) {
  p.require_symmetric(where);
  if (p.v != 1.0) throw DomainError(std::string(where) + ": requires v == 1");
}
}  // namespace detail

inline DiscriminantReport discriminant(const ModelParams& p) {
  detail::require_unit_coupling(p, "discriminant");
  return discriminant(p.g, p.k);
}

inline RegionId classify_region(double g, double k) {
  const double P = discriminant_value(g, k);
  if (std::abs(P) <= kRegionBoundaryTolerance ||
      std::abs(std::abs(g) - 1.0) <= kRegionBoundaryTolerance) {
    return RegionId::Boundary;
  }
  if (P < 0.0) return RegionId::Region1;
  return std::abs(g) < 1.0 ? RegionId::Region2 : RegionId::Region3;
}

enum class Family { TrivialPlus, TrivialMinus, S1Plus, S1Minus, S2Plus, S2Minus };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::TrivialPlus: return "trivial_plus";
    case Family::TrivialMinus: return "trivial_minus";
    case Family::S1Plus: return "s1_plus";
    case Family::S1Minus: return "s1_minus";
    case Family::S2Plus: return "s2_plus";
    case Family::S2Minus: return "s2_minus";
  }
  return "?";
}

/// Degenerate marks non-hyperbolic points that are not centres.
enum class Stability { Sink, Source, Saddle, Center, Degenerate };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Sink: return "sink";
    case Stability::Source: return "source";
    case Stability::Saddle: return "saddle";
    case Stability::Center: return "center";
    case Stability::Degenerate: return "degenerate";
  }
  return "?";
}

struct FixedPointRecord {
  BlochState position;
  Family family = Family::TrivialPlus;
  std::optional<double> y_root;
  std::array<cplx, 2> tangent_eigenvalues{};
  /// Full 3x3 spectrum of the stability matrix (reporting only).
  std::array<cplx, 3> spectrum{};
  Stability stability = Stability::Degenerate;
  double residual = 0.0;
};

struct FixedPointCatalog {
  RegionId region = RegionId::Boundary;
  DiscriminantReport discriminant;
  /// Set on region boundaries and on the Hermitian line k = 0, where the
  /// point count departs from the 2/6/4 pattern.
  bool degenerate = false;
  std::vector<FixedPointRecord> points;
};

/// Linearisation of the complex-interaction flow with the sphere constraint
/// substituted into the (z, z) entry and the third row.
inline Eigen::Matrix3d stability_matrix(const BlochState& s, const ModelParams& p) {
  p.require_symmetric("stability_matrix");
  if (std::abs(s.radius2() - 0.25) > 1e-8) {
    throw DomainError("stability_matrix: state is off the Bloch sphere");
  }
  const double g = p.g, k = p.k, v = p.v;
  const double x = s.sx, y = s.sy, z = s.sz;
  Eigen::Matrix3d J;
  J << 8 * k * z * z, -4 * g * z, -4 * g * y + 16 * k * x * z,
      4 * g * z, 8 * k * z * z, 4 * g * x - 2 * v + 16 * k * y * z,
      -16 * k * x * z, 2 * v - 16 * k * y * z, -8 * k * (x * x + y * y);
  return J;
}

/// Eigenvalues of a real 2x2 matrix from its trace and determinant.
inline std::array<cplx, 2> eigenvalues_2x2(const Eigen::Matrix2d& A) {
  const double half_tr = 0.5 * A.trace();
  const double det = A.determinant();
  const double disc = half_tr * half_tr - det;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    // Avoid cancellation in the smaller root.
    const double big = half_tr >= 0.0 ? half_tr + r : half_tr - r;
    const double small = big != 0.0 ? det / big : 0.0;
    return {cplx{std::max(big, small)}, cplx{std::min(big, small)}};
  }
  const double im = std::sqrt(-disc);
  return {cplx{half_tr, im}, cplx{half_tr, -im}};
}

/// Roots of the characteristic cubic of a real 3x3 matrix (Cardano with a
/// Newton polish). Roots are ordered by decreasing real part.
inline std::array<cplx, 3> eigenvalues_3x3(const Eigen::Matrix3d& A) {
  // lambda^3 + a lambda^2 + b lambda + c
  const double a = -A.trace();
  const double b = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0) + A(0, 0) * A(2, 2) -
                   A(0, 2) * A(2, 0) + A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  const double c = -A.determinant();
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const cplx disc = std::sqrt(cplx{q * q / 4.0 + p * p * p / 27.0});
  cplx u = std::pow(cplx{-q / 2.0} + disc, 1.0 / 3.0);
  if (std::abs(u) < 1e-300) u = std::pow(cplx{-q / 2.0} - disc, 1.0 / 3.0);
  const cplx omega{-0.5, std::sqrt(3.0) / 2.0};
  std::array<cplx, 3> roots;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(u) < 1e-300) {
      roots[i] = cplx{0.0};
    } else {
      roots[i] = u - p / (3.0 * u);
    }
    roots[i] -= a / 3.0;
    u *= omega;
  }
  const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const cplx f = ((r + a) * r + b) * r + c;
      const cplx df = (3.0 * r + 2.0 * a) * r + b;
      if (std::abs(df) < 1e-300) break;
      r -= f / df;
    }
    if (std::abs(r.imag()) < 1e-12 * scale) r = cplx{r.real()};
  }
  std::sort(roots.begin(), roots.end(), [](const cplx& l, const cplx& r) {
    return l.real() != r.real() ? l.real() > r.real() : l.imag() > r.imag();
  });
  return roots;
}

/// Orthonormal basis (columns) of the plane tangent to the sphere at s.
inline Eigen::Matrix<double, 3, 2> tangent_basis(const BlochState& s) {
  const Eigen::Vector3d n = Eigen::Vector3d(s.sx, s.sy, s.sz).normalized();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  if (std::abs(n.x()) > 0.9) axis = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = (axis - axis.dot(n) * n).normalized();
  const Eigen::Vector3d e2 = n.cross(e1);
  Eigen::Matrix<double, 3, 2> E;
  E.col(0) = e1;
  E.col(1) = e2;
  return E;
}

/// Stability matrix projected onto the tangent plane at s.
inline Eigen::Matrix2d tangent_block(const BlochState& s, const ModelParams& p) {
  const auto E = tangent_basis(s);
  return E.transpose() * stability_matrix(s, p) * E;
}

struct StabilityReport {
  Stability stability = Stability::Degenerate;
  std::array<cplx, 2> eigenvalues{};
};

/// Types a fixed point from the 2x2 tangent eigenproblem. Real parts within
/// tol_center = 1e-9 max|J| count as zero.
inline StabilityReport classify_stability(const FixedPointRecord& fp,
                                          const ModelParams& p) {
  const Eigen::Matrix3d J = stability_matrix(fp.position, p);
  const double tol = 1e-9 * std::max(J.cwiseAbs().maxCoeff(), 1e-300);
  const auto E = tangent_basis(fp.position);
  const Eigen::Matrix2d B = E.transpose() * J * E;
  StabilityReport rep;
  rep.eigenvalues = eigenvalues_2x2(B);
  const double r0 = rep.eigenvalues[0].real(), r1 = rep.eigenvalues[1].real();
  const bool complex_pair = rep.eigenvalues[0].imag() != 0.0;
  if (r0 < -tol && r1 < -tol) {
    rep.stability = Stability::Sink;
  } else if (r0 > tol && r1 > tol) {
    rep.stability = Stability::Source;
  } else if (!complex_pair && ((r0 > tol && r1 < -tol) || (r0 < -tol && r1 > tol))) {
    rep.stability = Stability::Saddle;
  } else if (complex_pair && std::abs(r0) <= tol && std::abs(r1) <= tol &&
             std::abs(rep.eigenvalues[0].imag()) > tol) {
    rep.stability = Stability::Center;
  } else {
    rep.stability = Stability::Degenerate;
  }
  return rep;
}

namespace detail {

inline FixedPointRecord make_record(const BlochState& s, Family family,
                                    std::optional<double> y, const ModelParams& p) {
  FixedPointRecord rec;
  rec.position = s;
  rec.family = family;
  rec.y_root = y;
  rec.residual = mf_rhs_complex_interaction(s, p).sphere_norm();
  if (rec.residual > 1e-10) {
    throw InvariantViolation("fixed_point_catalog: residual above 1e-10");
  }
  if (std::abs(s.radius2() - 0.25) > 1e-12) {
    throw InvariantViolation("fixed_point_catalog: point off the Bloch sphere");
  }
  const auto rep = classify_stability(rec, p);
  rec.stability = rep.stability;
  rec.tangent_eigenvalues = rep.eigenvalues;
  rec.spectrum = eigenvalues_3x3(stability_matrix(s, p));
  return rec;
}

}  // namespace detail

/// All stationary states on the sphere at (g, k) with v = 1. The trivial
/// pair (+-1/2, 0, 0) is always present; s_{1,+-} (root y_+) and s_{2,+-}
/// (root y_-) are added when the root lies in (0, 1/4].
inline FixedPointCatalog fixed_point_catalog(double g, double k) {
  const ModelParams p{1.0, 0.0, g, k};
  p.validate();
  FixedPointCatalog cat;
  cat.region = classify_region(g, k);
  cat.discriminant = discriminant(g, k);
  cat.degenerate = cat.region == RegionId::Boundary || k == 0.0;

  cat.points.push_back(detail::make_record({0.5, 0.0, 0.0, 1.0},
                                           Family::TrivialPlus, std::nullopt, p));
  cat.points.push_back(detail::make_record({-0.5, 0.0, 0.0, 1.0},
                                           Family::TrivialMinus, std::nullopt, p));

  auto add_pair = [&](std::optional<double> y, Family plus, Family minus) {
    if (!y || !(*y > 0.0) || *y > 0.25) return;
    const double w = 1.0 - 4.0 * (*y);
    const double z = std::sqrt(*y);
    // sz' = 0 fixes sy = k sz (1 - 4 sz^2), same sign as sz.
    cat.points.push_back(
        detail::make_record({0.5 * g * w, k * z * w, z, 1.0}, plus, y, p));
    cat.points.push_back(
        detail::make_record({0.5 * g * w, -k * z * w, -z, 1.0}, minus, y, p));
  };
  add_pair(cat.discriminant.y_plus, Family::S1Plus, Family::S1Minus);
  add_pair(cat.discriminant.y_minus, Family::S2Plus, Family::S2Minus);
  return cat;
}

inline FixedPointCatalog fixed_point_catalog(const ModelParams& p) {
  detail::require_unit_coupling(p, "fixed_point_catalog");
  return fixed_point_catalog(p.g, p.k);
}

// ---------------------------------------------------------------------------
// Limit cycles

struct LimitCycle {
  /// One period of the orbit, integrated forward in time.
  Trajectory<BlochState> orbit;
  double period = 0.0;
  /// Point where the orbit crosses the section sy = 0, sz > 0.
  BlochState section_point;
  /// |R(x*) - x*| of the return map at the located fixed point.
  double closure_residual = 0.0;
  /// True for the g = 0 great circle sx = 0.
  bool analytic = false;
  /// Stable for k < 0, unstable for k > 0.
  bool stable = false;
};

struct LimitCycleSearch {
  std::optional<LimitCycle> cycle;
  std::string diagnostic;
};

struct SectionReturn {
  double sx = 0.0;
  double time = 0.0;  ///< Elapsed |t| until the return.
  BlochState state;
};

/// Return map of the section sy = 0, sz > 0. Starting from (x, 0, +sqrt(1/4 -
/// x^2)) the flow is followed in direction `direction` (+1 forward, -1
/// backward) until it crosses the section again in the same sense. Returns
/// nullopt when no return happens within max_time.
inline std::optional<SectionReturn> section_return(const ModelParams& p, double x,
                                                   double direction,
                                                   double max_time = 200.0,
                                                   IntegratorConfig cfg = {1e-12, 1e-12, 0.01}) {
  using detail::Vec4;
  if (!(std::abs(x) < 0.5)) return std::nullopt;
  const BlochState start{x, 0.0, std::sqrt(0.25 - x * x), 1.0};
  // The norm plays no role in the return map and overflows over long
  // backward runs, so it is frozen.
  auto rhs = [p](double, const Vec4& y) -> Vec4 {
    Vec4 d = detail::to_vec(mf_rhs_complex_interaction(detail::to_bloch(y), p));
    d[3] = 0.0;
    return d;
  };
  const double sense = direction * mf_rhs_complex_interaction(start, p).dsy;
  if (sense == 0.0) return std::nullopt;
  const double sigma = sense > 0.0 ? 1.0 : -1.0;

  double t = 0.0;
  Vec4 y = detail::to_vec(start);
  double t_prev = t;
  Vec4 y_prev = y;
  std::optional<SectionReturn> result;
  try {
    solve_ode(rhs, t, y, direction * max_time, cfg, [&](double tt, Vec4& yy) {
      const bool crossed = sigma * y_prev[1] < 0.0 && sigma * yy[1] >= 0.0;
      if (crossed) {
        // Refine the crossing with single Dormand-Prince steps from y_prev.
        const Vec4 f_prev = rhs(t_prev, y_prev);
        auto sy_at = [&](double h) {
          return dopri_step<Vec4>(rhs, t_prev, y_prev, f_prev, h).y;
        };
        double lo = 0.0, hi = tt - t_prev;
        double f_lo = y_prev[1], f_hi = yy[1];
        Vec4 best = yy;
        double h_best = hi;
        int side = 0;
        for (int it = 0; it < 100 && std::abs(hi - lo) > 1e-15; ++it) {
          // Illinois false position.
          double h = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
          if (!(std::min(lo, hi) < h && h < std::max(lo, hi))) h = 0.5 * (lo + hi);
          const Vec4 ym = sy_at(h);
          const double fm = ym[1];
          best = ym;
          h_best = h;
          if (fm == 0.0) break;
          if ((fm < 0.0) == (f_lo < 0.0)) {
            lo = h;
            f_lo = fm;
            if (side == -1) f_hi *= 0.5;
            side = -1;
          } else {
            hi = h;
            f_hi = fm;
            if (side == 1) f_lo *= 0.5;
            side = 1;
          }
          if (std::abs(fm) < 1e-15) break;
        }
        if (best[2] > 0.0) {
          result = SectionReturn{best[0], std::abs(t_prev + h_best),
                                 detail::to_bloch(best)};
          return StepAction::Stop;
        }
      }
      t_prev = tt;
      y_prev = yy;
      return StepAction::Continue;
    });
  } catch (const IntegrationError&) {
    return std::nullopt;
  }
  return result;
}

/// Locates the periodic orbit of the complex-interaction flow (v = 1).
///
/// For g = 0 the orbit is the great circle sx = 0, which is invariant; the
/// seed is projected onto it and the period is measured by integration. For
/// g != 0 the fixed point of the section return map is bracketed on
/// sx in (-0.4, 0.4) and refined by false position. The flow is followed
/// backward in time when k > 0 so that the unstable cycle attracts.
inline LimitCycleSearch find_limit_cycle(const ModelParams& p,
                                         const BlochState& seed = {0.0, 0.5, 0.0, 1.0},
                                         const IntegratorConfig& cfg = {}) {
  detail::require_unit_coupling(p, "find_limit_cycle");
  LimitCycleSearch out;
  if (p.k == 0.0) {
    out.diagnostic = "k = 0: orbits form a continuum of closed curves, no isolated cycle";
    return out;
  }
  const double direction = p.k > 0.0 ? -1.0 : 1.0;
  constexpr double kMaxReturnTime = 200.0;

  LimitCycle cycle;
  cycle.stable = p.k < 0.0;
  double x_star = 0.0;

  if (p.g == 0.0) {
    // Fixed points on the sx = 0 circle need |sy sz| = v/(4k) <= 1/8.
    if (std::abs(p.k) >= 2.0 * p.v) {
      out.diagnostic = "g = 0, |k| >= 2: fixed points on the sx = 0 circle, no cycle";
      return out;
    }
    const auto ret = section_return(p, 0.0, direction, kMaxReturnTime);
    if (!ret) {
      out.diagnostic = "g = 0: no return to the section";
      return out;
    }
    cycle.analytic = true;
    cycle.period = ret->time;
    cycle.closure_residual = std::abs(ret->sx);
    x_star = 0.0;
  } else {
    auto residual = [&](double x) -> std::optional<std::pair<double, double>> {
      const auto ret = section_return(p, x, direction, kMaxReturnTime);
      if (!ret) return std::nullopt;
      return std::make_pair(ret->sx - x, ret->time);
    };
    constexpr int kSamples = 17;
    constexpr double lo_bracket = -0.4, hi_bracket = 0.4;
    std::vector<double> xs(kSamples);
    std::vector<std::optional<std::pair<double, double>>> rs(kSamples);
    for (int i = 0; i < kSamples; ++i) {
      xs[i] = lo_bracket + (hi_bracket - lo_bracket) * i / (kSamples - 1);
      rs[i] = residual(xs[i]);
    }
    std::optional<std::pair<double, double>> bracket;
    for (int i = 0; i + 1 < kSamples && !bracket; ++i) {
      if (rs[i] && rs[i + 1] && (rs[i]->first <= 0.0) != (rs[i + 1]->first <= 0.0)) {
        bracket = std::make_pair(xs[i], xs[i + 1]);
      }
    }
    if (!bracket) {
      out.diagnostic = "return map has no fixed point in sx in (-0.4, 0.4)";
      return out;
    }
    double a = bracket->first, b = bracket->second;
    double fa = residual(a)->first, fb = residual(b)->first;
    int side = 0;
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-13; ++it) {
      double x = (a * fb - b * fa) / (fb - fa);
      if (!(std::min(a, b) < x && x < std::max(a, b))) x = 0.5 * (a + b);
      const auto r = residual(x);
      if (!r) {
        out.diagnostic = "return map undefined inside the bracket";
        return out;
      }
      x_star = x;
      if (r->first == 0.0) break;
      if ((r->first < 0.0) == (fa < 0.0)) {
        a = x;
        fa = r->first;
        if (side == -1) fb *= 0.5;
        side = -1;
      } else {
        b = x;
        fb = r->first;
        if (side == 1) fa *= 0.5;
        side = 1;
      }
    }
    const auto final_ret = section_return(p, x_star, direction, kMaxReturnTime);
    if (!final_ret) {
      out.diagnostic = "refined section point does not return";
      return out;
    }
    cycle.period = final_ret->time;
    cycle.closure_residual = std::abs(final_ret->sx - x_star);
    if (cycle.closure_residual > 1e-8) {
      out.diagnostic = "return map did not close to 1e-8";
      return out;
    }
  }

  cycle.section_point = {x_star, 0.0, std::sqrt(0.25 - x_star * x_star), 1.0};
  BlochState start = cycle.section_point;
  if (cycle.analytic) {
    const double r = std::hypot(seed.sy, seed.sz);
    start = r > 0.0 ? BlochState{0.0, 0.5 * seed.sy / r, 0.5 * seed.sz / r, 1.0}
                    : cycle.section_point;
  }
  cycle.orbit = integrate(BlochField::ComplexInteraction, start, p, cycle.period, cfg);
  out.cycle = std::move(cycle);
  out.diagnostic = "ok";
  return out;
}

}  // namespace bhdimer
