#pragma once

// Heun's predictor-corrector ("modified Euler"), fixed step.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace mzchaos {

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

template <class S>
concept FlatState = requires(S& s, const S& cs) {
  s.values();
  cs.values();
};

template <FlatState S>
void axpy(S& y, double a, const S& x) {
  auto yv = y.values();
  auto xv = x.values();
  if (yv.size() != xv.size()) throw std::invalid_argument("axpy: state size mismatch");
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += a * xv[i];
}

template <class T>
void axpy(std::vector<T>& y, double a, const std::vector<T>& x) {
  if (y.size() != x.size()) throw std::invalid_argument("axpy: state size mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline void axpy(double& y, double a, double x) noexcept { y += a * x; }
inline void axpy(std::complex<double>& y, double a, const std::complex<double>& x) noexcept { y += a * x; }

namespace detail {
inline bool finite_value(double v) noexcept { return std::isfinite(v); }
inline bool finite_value(const std::complex<double>& v) noexcept {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
}  // namespace detail

template <FlatState S>
bool all_finite(const S& s) {
  for (const auto& v : s.values())
    if (!detail::finite_value(v)) return false;
  return true;
}
template <class T>
bool all_finite(const std::vector<T>& s) {
  for (const auto& v : s)
    if (!detail::finite_value(v)) return false;
  return true;
}
inline bool all_finite(double v) noexcept { return std::isfinite(v); }
inline bool all_finite(const std::complex<double>& v) noexcept { return detail::finite_value(v); }

/// Calls rhs(t, s) when that is well-formed, otherwise rhs(s).
template <class State, class Rhs>
State evaluate_rhs(Rhs& rhs, double t, const State& s) {
  if constexpr (std::is_invocable_v<Rhs&, double, const State&>) {
    return rhs(t, s);
  } else {
    (void)t;
    return rhs(s);
  }
}

/// s* = s + dt f(s);  s' = s + (dt/2) (f(s) + f(s*)).
/// Throws BlowUpError when the result has a non-finite component.
template <class State, class Rhs>
State heun_step(const State& s, Rhs&& rhs, double dt, double t = 0.0) {
  if (!(dt > 0.0)) throw std::invalid_argument("heun_step: dt must be > 0");
  State k1 = evaluate_rhs(rhs, t, s);
  State pred = s;
  axpy(pred, dt, k1);
  const State k2 = evaluate_rhs(rhs, t + dt, pred);
  axpy(k1, 1.0, k2);
  State out = s;
  axpy(out, 0.5 * dt, k1);
  if (!all_finite(out)) {
    std::ostringstream msg;
    msg << "non-finite state after step from t=" << t << " with dt=" << dt;
    throw BlowUpError(msg.str(), t + dt);
  }
  return out;
}

struct StepOptions {
  double dt = 1e-3;
  double t_end = 0.0;
  int stride = 1;  // snapshot every `stride` steps
};

/// Number of steps m with m * dt = t_end; rejects t_end that is not a multiple.
inline std::size_t step_count(double dt, double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end >= 0.0)) throw std::invalid_argument("final time must be >= 0");
  const double m = std::round(t_end / dt);
  if (std::abs(m * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
    std::ostringstream msg;
    msg << "final time " << t_end << " is not an integer multiple of dt=" << dt;
    throw std::invalid_argument(msg.str());
  }
  return static_cast<std::size_t>(m);
}

struct NoProjection {
  template <class State>
  void operator()(State&) const noexcept {}
};

template <class State>
struct StepOutcome {
  State final_state;
  std::size_t steps_taken = 0;
  bool blew_up = false;
  std::string diagnostic;
};

/// Steps from t = 0 to opt.t_end, calling observe(t, state) at t = 0 and every
/// `stride` steps, and post(state) after every step. A blow-up stops the run:
/// the outcome is flagged and the last finite state is kept.
template <class State, class Rhs, class Observer, class Post = NoProjection>
StepOutcome<State> integrate_observed(State state, Rhs&& rhs, const StepOptions& opt,
                                      Observer&& observe, Post&& post = {}) {
  if (opt.stride < 1) throw std::invalid_argument("stride must be >= 1");
  const std::size_t steps = step_count(opt.dt, opt.t_end);
  const auto stride = static_cast<std::size_t>(opt.stride);
  StepOutcome<State> outcome;
  observe(0.0, std::as_const(state));
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * opt.dt;
    try {
      state = heun_step(state, rhs, opt.dt, t);
    } catch (const BlowUpError& e) {
      outcome.blew_up = true;
      outcome.diagnostic = e.what();
      break;
    }
    post(state);
    outcome.steps_taken = n + 1;
    if ((n + 1) % stride == 0) observe(static_cast<double>(n + 1) * opt.dt, std::as_const(state));
  }
  outcome.final_state = std::move(state);
  return outcome;
}

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  bool blew_up = false;
  std::string diagnostic;
};

template <class State, class Rhs, class Post = NoProjection>
Trajectory<State> integrate(State state0, Rhs&& rhs, const StepOptions& opt, Post&& post = {}) {
  Trajectory<State> traj;
  auto outcome = integrate_observed(
      std::move(state0), std::forward<Rhs>(rhs), opt,
      [&](double t, const State& s) {
        traj.times.push_back(t);
        traj.states.push_back(s);
      },
      std::forward<Post>(post));
  traj.blew_up = outcome.blew_up;
  traj.diagnostic = std::move(outcome.diagnostic);
  return traj;
}

}  // namespace mzchaos
