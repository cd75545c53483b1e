#pragma once

// Explicit Runge-Kutta integration for Eigen column vectors (real or complex).
// Two methods: classical fixed-step RK4 and the Dormand-Prince 5(4) embedded
// pair with standard step-size control. Integration runs forward or backward
// in time depending on the sign of (t_end - t0).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "bhdimer/types.hpp"

namespace bhdimer {

enum class Method { RungeKutta4, DormandPrince45 };

inline const char* to_string(Method m) {
  return m == Method::RungeKutta4 ? "rk4" : "dopri45";
}

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  /// Upper bound on |h|; for RK4 this is the step itself.
  double max_step = 0.01;
  Method method = Method::DormandPrince45;

  void validate() const {
    auto tol_ok = [](double x) { return x > 0.0 && x <= 1e-2; };
    if (!tol_ok(rel_tol) || !tol_ok(abs_tol)) {
      throw DomainError("IntegratorConfig: tolerances must lie in (0, 1e-2]");
    }
    if (!(max_step > 0.0) || !std::isfinite(max_step)) {
      throw DomainError("IntegratorConfig: max_step must be positive");
    }
  }
};

/// Base for step-size underflow reports.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t_last)
      : std::runtime_error(what), t_last_(t_last) {}
  [[nodiscard]] double t_last() const { return t_last_; }

 private:
  double t_last_;
};

/// Integration failure carrying the last accepted state.
template <class State>
class IntegrationFailure : public IntegrationError {
 public:
  IntegrationFailure(const std::string& what, double t_last, State last)
      : IntegrationError(what, t_last), last_state(std::move(last)) {}
  State last_state;
};

/// What an observer wants the driver to do after an accepted step.
enum class StepAction {
  Continue,
  /// The observer rewrote y in place; cached derivatives are discarded.
  Modified,
  Stop,
};

struct SolveStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
  bool stopped_early = false;
};

namespace detail {

template <class Vec>
double scaled_error(const Vec& err, const Vec& y0, const Vec& y1, double rtol,
                    double atol) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale =
        atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / scale);
  }
  return worst;
}

template <class Vec>
bool all_finite(const Vec& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(std::abs(y[i]))) return false;
  }
  return true;
}

}  // namespace detail

/// One classical RK4 step.
template <class Vec, class Rhs>
Vec rk4_step(Rhs& rhs, double t, const Vec& y, double h) {
  const Vec k1 = rhs(t, y);
  const Vec k2 = rhs(t + 0.5 * h, Vec(y + (0.5 * h) * k1));
  const Vec k3 = rhs(t + 0.5 * h, Vec(y + (0.5 * h) * k2));
  const Vec k4 = rhs(t + h, Vec(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Result of a single Dormand-Prince attempt: fifth-order solution, the
/// embedded error estimate and the derivative at the new point (FSAL).
template <class Vec>
struct DopriStep {
  Vec y;
  Vec error;
  Vec f_end;
};

/// One Dormand-Prince 5(4) step from (t, y) with derivative f0 = rhs(t, y).
template <class Vec, class Rhs>
DopriStep<Vec> dopri_step(Rhs& rhs, double t, const Vec& y, const Vec& f0,
                          double h) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const Vec& k1 = f0;
  const Vec k2 = rhs(t + c2 * h, Vec(y + h * (a21 * k1)));
  const Vec k3 = rhs(t + c3 * h, Vec(y + h * (a31 * k1 + a32 * k2)));
  const Vec k4 = rhs(t + c4 * h, Vec(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const Vec k5 = rhs(t + c5 * h,
                     Vec(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const Vec k6 = rhs(t + h, Vec(y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                         a64 * k4 + a65 * k5)));
  Vec y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  Vec k7 = rhs(t + h, y_new);
  Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {std::move(y_new), std::move(err), std::move(k7)};
}

/// Integrates y' = rhs(t, y) from t0 to t_end. After every accepted step the
/// observer is called as observer(t, y) and may modify y or stop the run.
/// Returns the final time and state through (t0, y).
///
/// Throws IntegrationFailure<Vec> when the step size underflows or the state
/// becomes non-finite.
template <class Vec, class Rhs, class Observer>
SolveStats solve_ode(Rhs&& rhs, double& t, Vec& y, double t_end,
                     const IntegratorConfig& cfg, Observer&& observer) {
  cfg.validate();
  SolveStats stats;
  const double span = t_end - t;
  if (span == 0.0) return stats;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  auto counted = [&](double tt, const Vec& yy) -> Vec {
    ++stats.rhs_calls;
    return rhs(tt, yy);
  };

  auto remaining = [&] { return dir * (t_end - t); };
  auto fail = [&](const std::string& why) {
    throw IntegrationFailure<Vec>(why, t, y);
  };

  if (cfg.method == Method::RungeKutta4) {
    const auto n_steps = static_cast<std::size_t>(
        std::ceil(std::abs(span) / cfg.max_step - 1e-12));
    const double h = span / static_cast<double>(std::max<std::size_t>(n_steps, 1));
    const double t0 = t;
    for (std::size_t i = 1; i <= std::max<std::size_t>(n_steps, 1); ++i) {
      Vec y_new = rk4_step<Vec>(counted, t, y, h);
      if (!detail::all_finite(y_new)) fail("rk4: non-finite state");
      y = std::move(y_new);
      t = t0 + static_cast<double>(i) * h;
      ++stats.accepted;
      if (observer(t, y) == StepAction::Stop) {
        stats.stopped_early = true;
        return stats;
      }
    }
    t = t_end;
    return stats;
  }

  // Dormand-Prince with the elementary (non-PI) controller.
  constexpr double safety = 0.9, min_factor = 0.2, max_factor = 5.0;
  Vec f = counted(t, y);
  if (!detail::all_finite(f)) fail("dopri45: non-finite derivative");
  double h = std::min(cfg.max_step, std::abs(span));
  {
    // Initial guess from the derivative scale.
    double fnorm = 0.0, ynorm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      fnorm = std::max(fnorm, std::abs(f[i]));
      ynorm = std::max(ynorm, std::abs(y[i]));
    }
    if (fnorm > 0.0) {
      h = std::min(h, std::max(0.01 * std::max(ynorm, 1e-3) / fnorm, 1e-8));
    }
  }
  // A remainder this small is round-off from accumulating t, not a real step.
  const double end_slack = 1e-13 * std::max(1.0, std::abs(t_end));
  while (remaining() > 0.0) {
    if (remaining() <= end_slack) {
      t = t_end;
      break;
    }
    bool last = false;
    if (h >= remaining() || remaining() - h <= end_slack) {
      h = remaining();
      last = true;
    }
    const double h_min = 1e-14 * std::max(1.0, std::abs(t));
    if (h < h_min) fail("dopri45: step size underflow");

    auto step = dopri_step<Vec>(counted, t, y, f, dir * h);
    const double err = detail::scaled_error(step.error, y, step.y, cfg.rel_tol,
                                            cfg.abs_tol);
    if (!std::isfinite(err)) {
      ++stats.rejected;
      h *= min_factor;
      continue;
    }
    if (err <= 1.0) {
      t = last ? t_end : t + dir * h;
      y = std::move(step.y);
      f = std::move(step.f_end);
      ++stats.accepted;
      const StepAction action = observer(t, y);
      if (action == StepAction::Stop) {
        stats.stopped_early = true;
        return stats;
      }
      if (action == StepAction::Modified) f = counted(t, y);
      if (!detail::all_finite(f)) fail("dopri45: non-finite derivative");
      const double factor =
          err == 0.0 ? max_factor
                     : std::clamp(safety * std::pow(err, -0.2), min_factor, max_factor);
      h = std::min(h * factor, cfg.max_step);
    } else {
      ++stats.rejected;
      h *= std::clamp(safety * std::pow(err, -0.25), min_factor, 1.0);
    }
  }
  return stats;
}

/// Overload without an observer.
template <class Vec, class Rhs>
SolveStats solve_ode(Rhs&& rhs, double& t, Vec& y, double t_end,
                     const IntegratorConfig& cfg) {
  return solve_ode(std::forward<Rhs>(rhs), t, y, t_end, cfg,
                   [](double, Vec&) { return StepAction::Continue; });
}

}  // namespace bhdimer
