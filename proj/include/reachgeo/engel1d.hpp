#pragma once

// 1D Engel-model geodesic flow on the 2-jet space.
//
// Hamiltonian H = 1/2 ((v p_x + a p_v + p_t)^2 + p_a^2); writing
// h = v p_x + a p_v + p_t, the normal geodesic equations are
//   t' = h, x' = v h, v' = a h, a' = p_a,
//   p_t' = 0, p_x' = 0, p_v' = -p_x h, p_a' = -p_v h.
// Along a flow p_v and p_a are polynomials in the time variable:
//   p_v(t) = -p_x t + p_v(0),  p_a(t) = p_x t^2/2 - p_v(0) t + p_a(0).

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "reachgeo/geomcore.hpp"
#include "reachgeo/odeint.hpp"

namespace reachgeo::engel1d {

struct HamState1D {
  State1D state;
  Covector1D covector;

  std::array<double, 8> to_array() const {
    return {state.t, state.x, state.v, state.a,
            covector.p_t, covector.p_x, covector.p_v, covector.p_a};
  }
  static HamState1D from_array(const std::array<double, 8>& y) {
    return {{y[0], y[1], y[2], y[3]}, {y[4], y[5], y[6], y[7]}};
  }
};

inline double x1_coefficient(const std::array<double, 8>& y) {
  return y[2] * y[5] + y[3] * y[6] + y[4];  // h = v p_x + a p_v + p_t
}

inline double hamiltonian(const HamState1D& hs) {
  const auto y = hs.to_array();
  const double h = x1_coefficient(y);
  return 0.5 * (h * h + y[7] * y[7]);
}

inline std::array<double, 8> ham_rhs(const std::array<double, 8>& y) {
  const double h = x1_coefficient(y);
  return {h, y[2] * h, y[3] * h, y[7], 0.0, 0.0, -y[5] * h, -y[6] * h};
}

inline HamState1D ham_rhs(const HamState1D& hs) {
  return HamState1D::from_array(ham_rhs(hs.to_array()));
}

/// Integrate the normal geodesic flow over [0, span]. When nsamples > 0 the
/// trajectory is resampled on a uniform grid of that many points.
inline Trajectory1D flow(const HamState1D& initial, double span, const ode::StepControl& ctrl,
                         std::size_t nsamples = 0) {
  auto rhs = [](double, const std::array<double, 8>& y) { return ham_rhs(y); };
  auto sol = ode::integrate<8>(rhs, initial.to_array(), 0.0, span, ctrl);

  Trajectory1D traj;
  traj.complete = sol.complete();
  traj.steps.adaptive = ctrl.mode == ode::StepControl::Mode::adaptive;
  traj.steps.tolerance = ctrl.abs_tol;
  traj.steps.fixed_step = ctrl.step;
  traj.steps.accepted = sol.accepted;
  traj.steps.rejected = sol.rejected;

  auto emit = [&](double s, const std::array<double, 8>& y) {
    traj.s.push_back(s);
    traj.states.push_back(State1D::from_array({y[0], y[1], y[2], y[3]}));
    traj.covectors.push_back(Covector1D::from_array({y[4], y[5], y[6], y[7]}));
  };
  double min_h = std::numeric_limits<double>::infinity();
  if (nsamples >= 2 && sol.complete()) {
    const double s1 = sol.back_s();
    for (std::size_t i = 0; i < nsamples; ++i) {
      const double s = s1 * double(i) / double(nsamples - 1);
      emit(s, sol.at(s));
    }
  } else {
    for (std::size_t i = 0; i < sol.s.size(); ++i) emit(sol.s[i], sol.y[i]);
  }
  for (std::size_t i = 0; i < sol.s.size(); ++i)
    min_h = std::min(min_h, x1_coefficient(sol.y[i]));
  traj.min_h = min_h;
  traj.admissible = traj.complete && min_h > kAdmissibleFloor;
  return traj;
}

/// Admissible controls of a flowed trajectory in the time parameterization:
/// grid = t(s), alpha1 = 1, alpha2 = j = p_a / h. Requires min_h > 0.
inline std::pair<std::vector<double>, Controls1D> admissible_controls(const Trajectory1D& traj) {
  std::vector<double> tgrid;
  Controls1D c;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto y = HamState1D{traj.states[i], traj.covectors[i]}.to_array();
    const double h = x1_coefficient(y);
    if (!(h > 0)) throw std::domain_error("admissible_controls: h must stay positive");
    tgrid.push_back(traj.states[i].t);
    c.alpha1.push_back(1.0);
    c.alpha2.push_back(y[7] / h);
  }
  return {tgrid, c};
}

/// Frame controls in the flow parameter: alpha1 = h, alpha2 = p_a.
inline std::pair<std::vector<double>, Controls1D> frame_controls(const Trajectory1D& traj) {
  Controls1D c;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto y = HamState1D{traj.states[i], traj.covectors[i]}.to_array();
    c.alpha1.push_back(x1_coefficient(y));
    c.alpha2.push_back(y[7]);
  }
  return {traj.s, c};
}

/// Jerk profile j(t) = e0 + e1 t + e2 t^2/2 of the polynomial connection.
struct JerkPolynomial {
  double e0 = 0, e1 = 0, e2 = 0;

  double operator()(double t) const { return e0 + e1 * t + e2 * t * t / 2; }

  /// (x, v, a) at time t for the curve started at the origin.
  std::array<double, 3> integrate(double t) const {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double a = e0 * t + e1 * t2 / 2 + e2 * t3 / 6;
    const double v = e0 * t2 / 2 + e1 * t3 / 6 + e2 * t4 / 24;
    const double x = e0 * t3 / 6 + e1 * t4 / 24 + e2 * t5 / 120;
    return {x, v, a};
  }
};

/// Quadratic-jerk admissible curve from the origin to (1, x1, v1, a1).
/// The integrated system has the constant coefficient matrix
///   D = [[1/6, 1/24, 1/120], [1/2, 1/6, 1/24], [1, 1/2, 1/6]]
/// whose exact inverse has integer entries.
inline JerkPolynomial connect_admissible(double x1, double v1, double a1) {
  return {60 * x1 - 24 * v1 + 3 * a1,
          -360 * x1 + 168 * v1 - 24 * a1,
          720 * x1 - 360 * v1 + 60 * a1};
}

/// Time-parameterized acceleration rate of a normal geodesic started at the
/// origin:  a'(t) = p_a(t) / sqrt(p_t^2 + p_a(0)^2 - p_a(t)^2),
/// valid while the radicand stays nonnegative.
class AccelReparam {
 public:
  AccelReparam(double p_t, double p_v0, double p_a0, double p_x, double max_horizon = 1e6)
      : p_t_(p_t), p_v0_(p_v0), p_a0_(p_a0), p_x_(p_x) {
    if (!(p_t > 0)) throw std::invalid_argument("reparam_accel_1d: requires p_t > 0");
    horizon_ = first_exit(max_horizon);
  }

  double p_a(double t) const { return p_x_ * t * t / 2 - p_v0_ * t + p_a0_; }
  double radicand(double t) const {
    const double pa = p_a(t);
    return p_t_ * p_t_ + p_a0_ * p_a0_ - pa * pa;
  }
  double horizon() const { return horizon_; }

  /// a'(t); refuses evaluation past the admissibility horizon.
  double operator()(double t) const {
    if (t < 0 || t > horizon_)
      throw std::domain_error("reparam_accel_1d: t beyond admissibility horizon");
    const double r = std::max(radicand(t), 0.0);
    return p_a(t) / std::sqrt(r);
  }

 private:
  // Roots of p_a(t) = +-sqrt(C) are the exits; both are plain quadratics.
  double first_exit(double max_horizon) const {
    const double root_c = std::hypot(p_t_, p_a0_);
    double best = max_horizon;
    for (double target : {root_c, -root_c}) {
      // p_x/2 t^2 - p_v0 t + (p_a0 - target) = 0
      const double A = p_x_ / 2, B = -p_v0_, Cc = p_a0_ - target;
      if (std::abs(A) < 1e-300) {
        if (std::abs(B) > 1e-300) {
          const double t = -Cc / B;
          if (t > 1e-14 && t < best) best = t;
        }
        continue;
      }
      const double disc = B * B - 4 * A * Cc;
      if (disc < 0) continue;
      const double sq = std::sqrt(disc);
      for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
        if (t > 1e-14 && t < best) best = t;
    }
    return best;
  }

  double p_t_, p_v0_, p_a0_, p_x_;
  double horizon_;
};

inline AccelReparam reparam_accel(double p_t, double p_v0, double p_a0, double p_x,
                                  double max_horizon = 1e6) {
  return AccelReparam(p_t, p_v0, p_a0, p_x, max_horizon);
}

}  // namespace reachgeo::engel1d
