#pragma once

// Closed-form minimum-jerk reach: the fifth-order polynomial
//   x(t) = x0 + (xT - x0) (6 tau^5 - 15 tau^4 + 10 tau^3),  tau = t/T,
// which minimizes 1/2 integral (x'''^2 + y'''^2) dt among motions that begin
// and end with zero velocity and acceleration. Used as the independent oracle
// for straight-reach comparisons.

#include <array>
#include <cmath>
#include <stdexcept>

namespace reachgeo::minjerk {

struct QuinticReach {
  double x0 = 0, y0 = 0;
  double xT = 0, yT = 0;
  double T = 1;

  void validate() const {
    if (!(T > 0)) throw std::invalid_argument("QuinticReach: T must be positive");
  }
};

namespace detail {
inline double shape(double u) { return ((6 * u - 15) * u + 10) * u * u * u; }
inline double shape_d1(double u) { return ((30 * u - 60) * u + 30) * u * u; }
inline double shape_d2(double u) { return ((120 * u - 180) * u + 60) * u; }
inline double shape_d3(double u) { return (360 * u - 360) * u + 60; }

inline double tau_of(const QuinticReach& r, double t) {
  r.validate();
  if (t < -1e-15 * r.T || t > r.T * (1 + 1e-15))
    throw std::domain_error("minjerk: t outside [0, T]");
  return std::min(std::max(t / r.T, 0.0), 1.0);
}
}  // namespace detail

/// Hand position at time t in [0, T].
inline std::array<double, 2> quintic_position(const QuinticReach& r, double t) {
  const double s = detail::shape(detail::tau_of(r, t));
  return {r.x0 + (r.xT - r.x0) * s, r.y0 + (r.yT - r.y0) * s};
}

struct Kinematics {
  std::array<double, 2> velocity;
  std::array<double, 2> acceleration;
  std::array<double, 2> jerk;
};

/// Analytic first/second/third derivatives at time t in [0, T].
inline Kinematics quintic_derivatives(const QuinticReach& r, double t) {
  const double u = detail::tau_of(r, t);
  const double dx = r.xT - r.x0, dy = r.yT - r.y0;
  const double d1 = detail::shape_d1(u), d2 = detail::shape_d2(u), d3 = detail::shape_d3(u);
  const double iT = 1.0 / r.T, iT2 = iT * iT, iT3 = iT2 * iT;
  return {{dx * d1 * iT, dy * d1 * iT},
          {dx * d2 * iT2, dy * d2 * iT2},
          {dx * d3 * iT3, dy * d3 * iT3}};
}

/// Cost 1/2 integral (x'''^2 + y'''^2) dt, by composite-Simpson quadrature of
/// the analytic jerk. For the quintic this evaluates to 360 D^2 / T^5 per
/// coordinate displacement D.
inline double minjerk_cost(const QuinticReach& r, std::size_t n = 2048) {
  r.validate();
  if (n % 2) ++n;
  const double h = r.T / static_cast<double>(n);
  auto f = [&](double t) {
    const auto k = quintic_derivatives(r, t);
    return k.jerk[0] * k.jerk[0] + k.jerk[1] * k.jerk[1];
  };
  double acc = f(0.0) + f(r.T);
  for (std::size_t i = 1; i < n; ++i) acc += f(h * double(i)) * (i % 2 ? 4.0 : 2.0);
  return 0.5 * acc * h / 3.0;
}

}  // namespace reachgeo::minjerk
