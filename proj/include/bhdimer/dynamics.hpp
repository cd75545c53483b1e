#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bhdimer/core.hpp"
#include "bhdimer/integrator.hpp"

namespace bhdimer {

/// Bloch-vector fields understood by integrate().
enum class BlochField { ComplexInteraction, Hermitian, LindbladMeanField };

/// Spinor fields understood by integrate().
enum class SpinorField { ComplexInteractionNlse, Gpe, ComplexGpe };

inline const char* to_string(BlochField f) {
  switch (f) {
    case BlochField::ComplexInteraction: return "complex_interaction";
    case BlochField::Hermitian: return "hermitian";
    case BlochField::LindbladMeanField: return "lindblad_mean_field";
  }
  return "?";
}

inline const char* to_string(SpinorField f) {
  switch (f) {
    case SpinorField::ComplexInteractionNlse: return "complex_interaction_nlse";
    case SpinorField::Gpe: return "gpe";
    case SpinorField::ComplexGpe: return "complex_gpe";
  }
  return "?";
}

struct TrajectoryMeta {
  std::string field;
  ModelParams params;
  IntegratorConfig config;
};

/// Time-ordered samples of a state. times is strictly increasing and has the
/// same length as states.
template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  TrajectoryMeta meta;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] const State& back() const { return states.back(); }
};

/// Minimum number of stored samples per integration.
inline constexpr std::size_t kMinSamples = 200;

namespace detail {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec2c = Eigen::Matrix<cplx, 2, 1>;

inline Vec4 to_vec(const BlochState& s) { return {s.sx, s.sy, s.sz, s.n}; }
inline BlochState to_bloch(const Vec4& y) { return {y[0], y[1], y[2], y[3]}; }
inline Vec4 to_vec(const Derivative& d) { return {d.dsx, d.dsy, d.dsz, d.dn}; }
inline Vec2c to_vec(const SpinorState& s) { return {s.psi1, s.psi2}; }
inline SpinorState to_spinor(const Vec2c& y) { return {y[0], y[1]}; }

inline Derivative eval_field(BlochField field, const BlochState& s,
                             const ModelParams& p) {
  switch (field) {
    case BlochField::ComplexInteraction: return mf_rhs_complex_interaction(s, p);
    case BlochField::Hermitian: return mf_rhs_hermitian(s, p);
    case BlochField::LindbladMeanField: return lb_mf_rhs(s, p);
  }
  throw DomainError("unknown Bloch field");
}

inline SpinorDerivative eval_field(SpinorField field, const SpinorState& s,
                                   const ModelParams& p) {
  switch (field) {
    case SpinorField::ComplexInteractionNlse: return nlse_rhs_complex_interaction(s, p);
    case SpinorField::Gpe: return nlse_rhs_gpe(s, p, false);
    case SpinorField::ComplexGpe: return nlse_rhs_gpe(s, p, true);
  }
  throw DomainError("unknown spinor field");
}

/// Caps max_step so that a run over |span| yields at least kMinSamples points.
inline IntegratorConfig dense_config(IntegratorConfig cfg, double span) {
  cfg.max_step = std::min(cfg.max_step, std::abs(span) / double(kMinSamples));
  return cfg;
}

template <class State, class Vec, class Rhs, class FromVec>
Trajectory<State> run(Rhs rhs, const Vec& y0, double t_end,
                      const IntegratorConfig& cfg, FromVec from_vec,
                      TrajectoryMeta meta) {
  if (!(t_end > 0.0)) throw DomainError("integrate: t_end must be positive");
  Trajectory<State> traj;
  traj.meta = std::move(meta);
  traj.times.push_back(0.0);
  traj.states.push_back(from_vec(y0));
  double t = 0.0;
  Vec y = y0;
  try {
    solve_ode(rhs, t, y, t_end, dense_config(cfg, t_end), [&](double tt, Vec& yy) {
      traj.times.push_back(tt);
      traj.states.push_back(from_vec(yy));
      return StepAction::Continue;
    });
  } catch (const IntegrationFailure<Vec>& e) {
    throw IntegrationFailure<State>(e.what(), e.t_last(), from_vec(e.last_state));
  }
  return traj;
}

}  // namespace detail

/// Integrates a Bloch-vector field from s0 over [0, t_end]. Stores every
/// accepted step (at least kMinSamples) plus the endpoint. No projection onto
/// the sphere is applied.
inline Trajectory<BlochState> integrate(BlochField field, const BlochState& s0,
                                        const ModelParams& p, double t_end,
                                        const IntegratorConfig& cfg = {}) {
  if (!s0.finite()) throw DomainError("integrate: non-finite initial state");
  auto rhs = [field, p](double, const detail::Vec4& y) -> detail::Vec4 {
    return detail::to_vec(detail::eval_field(field, detail::to_bloch(y), p));
  };
  return detail::run<BlochState>(rhs, detail::to_vec(s0), t_end, cfg,
                                 detail::to_bloch,
                                 TrajectoryMeta{to_string(field), p, cfg});
}

/// Integrates a spinor field from psi0 over [0, t_end].
inline Trajectory<SpinorState> integrate(SpinorField field, const SpinorState& psi0,
                                         const ModelParams& p, double t_end,
                                         const IntegratorConfig& cfg = {}) {
  if (!psi0.finite()) throw DomainError("integrate: non-finite initial state");
  auto rhs = [field, p](double, const detail::Vec2c& y) -> detail::Vec2c {
    const SpinorState d =
        detail::eval_field(field, detail::to_spinor(y), p).time_derivative();
    return detail::to_vec(d);
  };
  return detail::run<SpinorState>(rhs, detail::to_vec(psi0), t_end, cfg,
                                  detail::to_spinor,
                                  TrajectoryMeta{to_string(field), p, cfg});
}

/// Propagates s by duration (negative runs backward) and returns the end state.
inline BlochState propagate(BlochField field, const BlochState& s,
                            const ModelParams& p, double duration,
                            const IntegratorConfig& cfg = {}) {
  auto rhs = [field, p](double, const detail::Vec4& y) -> detail::Vec4 {
    return detail::to_vec(detail::eval_field(field, detail::to_bloch(y), p));
  };
  double t = 0.0;
  detail::Vec4 y = detail::to_vec(s);
  solve_ode(rhs, t, y, duration, cfg);
  return detail::to_bloch(y);
}

/// Linear interpolation of a Bloch trajectory at time t (clamped to range).
inline BlochState sample_at(const Trajectory<BlochState>& traj, double t) {
  if (traj.times.empty()) throw DomainError("sample_at: empty trajectory");
  if (t <= traj.times.front()) return traj.states.front();
  if (t >= traj.times.back()) return traj.states.back();
  const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  const auto i = static_cast<std::size_t>(it - traj.times.begin());
  const double t0 = traj.times[i - 1], t1 = traj.times[i];
  const double w = (t - t0) / (t1 - t0);
  const BlochState& a = traj.states[i - 1];
  const BlochState& b = traj.states[i];
  return {a.sx + w * (b.sx - a.sx), a.sy + w * (b.sy - a.sy),
          a.sz + w * (b.sz - a.sz), a.n + w * (b.n - a.n)};
}

/// Returns the index of the candidate point whose ball of the given radius
/// contains every sample in the trailing 10% of the trajectory.
inline std::optional<std::size_t> detect_convergence(
    const Trajectory<BlochState>& traj, std::span<const BlochState> candidates,
    double radius) {
  if (!(radius > 0.0)) throw DomainError("detect_convergence: radius must be positive");
  if (traj.states.empty()) return std::nullopt;
  const std::size_t n = traj.states.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    bool inside = true;
    for (std::size_t i = n - tail; i < n && inside; ++i) {
      inside = traj.states[i].distance_to(candidates[c]) <= radius;
    }
    if (inside) return c;
  }
  return std::nullopt;
}

}  // namespace bhdimer
