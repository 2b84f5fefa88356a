#pragma once

// Explicit Runge-Kutta integration with dense output.
//
// Two modes: classical fixed-step RK4, and an embedded Dormand-Prince 5(4)
// pair with PI step-size control. Dense output at arbitrary points inside the
// span uses cubic Hermite interpolation on the accepted nodes (4th order).
// Callers may supply a step-rejection predicate (guard); the integrator never
// commits a step whose endpoint violates it.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace reachgeo::ode {

struct StepControl {
  enum class Mode { fixed, adaptive };
  Mode mode = Mode::adaptive;
  double step = 1e-3;        // fixed mode step
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double min_step = 1e-13;
  double max_step = 0.0;     // 0 = span
  std::size_t max_steps = 1000000;

  static StepControl fixed_step(double h) {
    StepControl c;
    c.mode = Mode::fixed;
    c.step = h;
    return c;
  }
  static StepControl adaptive(double tol = 1e-10) {
    StepControl c;
    c.abs_tol = c.rel_tol = tol;
    return c;
  }
  void validate() const {
    if (step <= 0 || abs_tol <= 0 || rel_tol <= 0)
      throw std::invalid_argument("StepControl: tolerances and step must be positive");
    if (min_step <= 0 || (max_step != 0.0 && min_step > max_step))
      throw std::invalid_argument("StepControl: min_step must be positive and <= max_step");
  }
};

enum class Status { complete, min_step_reached, max_steps_exceeded };

/// Sampled solution of an IVP. Nodes are the accepted integration steps;
/// `at` interpolates between them with the stored derivatives.
template <std::size_t N>
struct Solution {
  using Vec = std::array<double, N>;
  std::vector<double> s;
  std::vector<Vec> y;
  std::vector<Vec> dy;
  Status status = Status::complete;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  bool complete() const { return status == Status::complete; }
  double front_s() const { return s.front(); }
  double back_s() const { return s.back(); }

  Vec at(double si) const {
    if (s.size() < 2) return y.front();
    if (si <= s.front()) return y.front();
    if (si >= s.back()) return y.back();
    std::size_t lo = 0, hi = s.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (s[mid] <= si ? lo : hi) = mid;
    }
    const double h = s[lo + 1] - s[lo];
    const double u = (si - s[lo]) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    Vec out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = h00 * y[lo][i] + h10 * h * dy[lo][i] + h01 * y[lo + 1][i] + h11 * h * dy[lo + 1][i];
    return out;
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c[7] = {0., 1. / 5, 3. / 10, 4. / 5, 8. / 9, 1., 1.};
inline constexpr double dp_a[7][6] = {
    {},
    {1. / 5},
    {3. / 40, 9. / 40},
    {44. / 45, -56. / 15, 32. / 9},
    {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729},
    {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
    {35. / 384, 0., 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84}};
inline constexpr double dp_e[7] = {71. / 57600,     0., -71. / 16695, 71. / 1920,
                                   -17253. / 339200, 22. / 525, -1. / 40};

}  // namespace detail

/// Integrate y' = rhs(s, y) over [s0, s1].
/// guard: step-rejection predicate; a proposed step whose endpoint fails it is
/// rejected and retried with a smaller step (fails the run at min_step).
template <std::size_t N, class Rhs>
Solution<N> integrate(Rhs&& rhs, const std::array<double, N>& y0, double s0, double s1,
                      const StepControl& ctrl,
                      const std::function<bool(const std::array<double, N>&)>& guard = {}) {
  using Vec = std::array<double, N>;
  ctrl.validate();
  const double span = s1 - s0;
  if (span <= 0) throw std::invalid_argument("integrate: span must have s1 > s0");

  Solution<N> sol;
  auto push = [&](double s, const Vec& y, const Vec& f) {
    sol.s.push_back(s);
    sol.y.push_back(y);
    sol.dy.push_back(f);
  };

  Vec y = y0;
  double s = s0;
  Vec f = rhs(s, y);
  push(s, y, f);

  auto axpy = [](Vec& out, const Vec& y, double h, const double* w, const Vec* k, int n) {
    for (std::size_t i = 0; i < N; ++i) {
      double acc = y[i];
      for (int j = 0; j < n; ++j) acc += h * w[j] * k[j][i];
      out[i] = acc;
    }
  };

  if (ctrl.mode == StepControl::Mode::fixed) {
    const std::size_t nsteps = static_cast<std::size_t>(std::ceil(span / ctrl.step - 1e-12));
    if (nsteps > ctrl.max_steps) {
      sol.status = Status::max_steps_exceeded;
      return sol;
    }
    const double h = span / static_cast<double>(nsteps);
    for (std::size_t i = 0; i < nsteps; ++i) {
      Vec k1 = f, k2, k3, k4, tmp;
      const double w1[] = {0.5};
      axpy(tmp, y, h, w1, &k1, 1);
      k2 = rhs(s + 0.5 * h, tmp);
      axpy(tmp, y, h, w1, &k2, 1);
      k3 = rhs(s + 0.5 * h, tmp);
      const double w2[] = {1.0};
      axpy(tmp, y, h, w2, &k3, 1);
      k4 = rhs(s + h, tmp);
      Vec ynew;
      for (std::size_t j = 0; j < N; ++j)
        ynew[j] = y[j] + (h / 6.0) * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
      const double snew = (i + 1 == nsteps) ? s1 : s0 + h * static_cast<double>(i + 1);
      if (guard && !guard(ynew)) {
        sol.status = Status::min_step_reached;
        return sol;
      }
      y = ynew;
      s = snew;
      f = rhs(s, y);
      push(s, y, f);
      ++sol.accepted;
    }
    return sol;
  }

  // adaptive Dormand-Prince with PI control
  const double hmax = ctrl.max_step > 0 ? ctrl.max_step : span;
  double h = std::min(hmax, span / 100.0);
  double err_prev = 1.0;
  constexpr double alpha = 0.7 / 5.0, beta = 0.4 / 5.0;
  Vec k[7];
  k[0] = f;
  std::size_t taken = 0;
  while (s < s1) {
    if (taken++ > ctrl.max_steps) {
      sol.status = Status::max_steps_exceeded;
      return sol;
    }
    h = std::min(h, s1 - s);
    if (h < ctrl.min_step) {
      sol.status = Status::min_step_reached;
      return sol;
    }
    Vec ys;
    for (int stage = 1; stage < 7; ++stage) {
      axpy(ys, y, h, detail::dp_a[stage], k, stage);
      k[stage] = rhs(s + detail::dp_c[stage] * h, ys);
    }
    const Vec& ynew = ys;  // stage 7 state is the 5th-order solution (FSAL)
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double e = 0.0;
      for (int j = 0; j < 7; ++j) e += detail::dp_e[j] * k[j][i];
      const double sc =
          ctrl.abs_tol + ctrl.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      e = h * e / sc;
      err += e * e;
    }
    err = std::sqrt(err / static_cast<double>(N));
    const bool guard_ok = !guard || guard(ynew);
    if (std::isfinite(err) && err <= 1.0 && guard_ok) {
      const double snew = (s1 - s <= h * (1 + 1e-12)) ? s1 : s + h;
      s = snew;
      y = ynew;
      k[0] = k[6];  // FSAL
      push(s, y, k[0]);
      ++sol.accepted;
      double fac = 0.9 * std::pow(std::max(err, 1e-16), -alpha) * std::pow(err_prev, beta);
      fac = std::min(5.0, std::max(0.2, fac));
      h = std::min(hmax, h * fac);
      err_prev = std::max(err, 1e-4);
    } else {
      ++sol.rejected;
      if (!std::isfinite(err) || !guard_ok) {
        h *= 0.5;
      } else {
        double fac = 0.9 * std::pow(err, -alpha);
        h *= std::min(0.9, std::max(0.2, fac));
      }
    }
  }
  return sol;
}

/// Endpoint-only integration; `monitor`, when given, sees every accepted node.
template <std::size_t N, class Rhs>
std::pair<std::array<double, N>, Status> integrate_endpoint(
    Rhs&& rhs, const std::array<double, N>& y0, double s0, double s1,
    const StepControl& ctrl,
    const std::function<void(double, const std::array<double, N>&)>& monitor = {}) {
  auto sol = integrate<N>(rhs, y0, s0, s1, ctrl);
  if (monitor)
    for (std::size_t i = 0; i < sol.s.size(); ++i) monitor(sol.s[i], sol.y[i]);
  return {sol.y.back(), sol.status};
}

}  // namespace reachgeo::ode
