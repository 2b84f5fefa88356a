#pragma once

// Shared domain types for the two kinematic models, the horizontal frames,
// and the length/energy functionals on sampled admissible controls.
//
// 1D model: 2-jet space with coordinates (t, x, v, a), horizontal frame
//   X1 = d/dt + v d/dx + a d/dv,  X2 = d/da.
// 2D model: R^3_(t,x,y) x S^1_theta x R^2_(v,a), horizontal frame
//   X1 = d/dt + v cos(theta) d/dx + v sin(theta) d/dy + a d/dv,
//   X2 = d/dtheta,  X3 = d/da.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace reachgeo {

inline double wrap_angle(double theta) {
  // canonical representative in (-pi, pi]
  double w = std::remainder(theta, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

struct State1D {
  double t = 0, x = 0, v = 0, a = 0;
  std::array<double, 4> to_array() const { return {t, x, v, a}; }
  static State1D from_array(const std::array<double, 4>& q) { return {q[0], q[1], q[2], q[3]}; }
};

struct Covector1D {
  double p_t = 0, p_x = 0, p_v = 0, p_a = 0;
  std::array<double, 4> to_array() const { return {p_t, p_x, p_v, p_a}; }
  static Covector1D from_array(const std::array<double, 4>& p) {
    return {p[0], p[1], p[2], p[3]};
  }
};

struct State2D {
  double t = 0, x = 0, y = 0, theta = 0, v = 0, a = 0;
  // theta is stored as an accumulated angle so flows stay continuous;
  // wrap on read when a canonical value is needed.
  double theta_wrapped() const { return wrap_angle(theta); }
  std::array<double, 6> to_array() const { return {t, x, y, theta, v, a}; }
  static State2D from_array(const std::array<double, 6>& q) {
    return {q[0], q[1], q[2], q[3], q[4], q[5]};
  }
};

struct Covector2D {
  double p_t = 0, p_x = 0, p_y = 0, p_theta = 0, p_v = 0, p_a = 0;
  std::array<double, 6> to_array() const { return {p_t, p_x, p_y, p_theta, p_v, p_a}; }
  static Covector2D from_array(const std::array<double, 6>& p) {
    return {p[0], p[1], p[2], p[3], p[4], p[5]};
  }
};

/// Horizontal frame at a 1D state, rows ordered (t, x, v, a).
inline std::array<std::array<double, 4>, 2> eval_fields_1d(const State1D& s) {
  return {{{1.0, s.v, s.a, 0.0}, {0.0, 0.0, 0.0, 1.0}}};
}

/// Horizontal frame at a 2D state, rows ordered (t, x, y, theta, v, a).
inline std::array<std::array<double, 6>, 3> eval_fields_2d(const State2D& s) {
  return {{{1.0, s.v * std::cos(s.theta), s.v * std::sin(s.theta), 0.0, s.a, 0.0},
           {0.0, 0.0, 0.0, 1.0, 0.0, 0.0},
           {0.0, 0.0, 0.0, 0.0, 0.0, 1.0}}};
}

/// Coefficients of a sampled curve tangent in the horizontal frame.
/// Admissible curves have alpha1 == 1 at every sample.
struct Controls1D {
  std::vector<double> alpha1;
  std::vector<double> alpha2;  // = j for admissible curves
};

struct Controls2D {
  std::vector<double> alpha1;
  std::vector<double> k;
  std::vector<double> j;
};

namespace detail {
inline void check_grid(std::size_t n, std::size_t m, const char* what) {
  if (n != m)
    throw std::invalid_argument(std::string(what) + ": control samples do not match the grid (" +
                                std::to_string(m) + " vs " + std::to_string(n) + ")");
  if (n < 2) throw std::invalid_argument(std::string(what) + ": need at least two samples");
}

template <class F>
double trapezoid(const std::vector<double>& grid, F&& f) {
  double acc = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    acc += 0.5 * (grid[i] - grid[i - 1]) * (f(i - 1) + f(i));
  return acc;
}
}  // namespace detail

/// Length of a sampled horizontal curve, trapezoid rule on its grid:
/// integral of sqrt(alpha1^2 + alpha2^2); for admissible curves sqrt(1 + j^2).
inline double curve_length(const std::vector<double>& grid, const Controls1D& c) {
  detail::check_grid(grid.size(), c.alpha1.size(), "curve_length");
  detail::check_grid(grid.size(), c.alpha2.size(), "curve_length");
  return detail::trapezoid(grid, [&](std::size_t i) {
    return std::hypot(c.alpha1[i], c.alpha2[i]);
  });
}

inline double curve_length(const std::vector<double>& grid, const Controls2D& c) {
  detail::check_grid(grid.size(), c.alpha1.size(), "curve_length");
  detail::check_grid(grid.size(), c.k.size(), "curve_length");
  detail::check_grid(grid.size(), c.j.size(), "curve_length");
  return detail::trapezoid(grid, [&](std::size_t i) {
    return std::sqrt(c.alpha1[i] * c.alpha1[i] + c.k[i] * c.k[i] + c.j[i] * c.j[i]);
  });
}

/// Energy functional: 1/2 integral of (alpha1^2 + alpha2^2 [+ k^2]).
inline double curve_energy(const std::vector<double>& grid, const Controls1D& c) {
  detail::check_grid(grid.size(), c.alpha1.size(), "curve_energy");
  detail::check_grid(grid.size(), c.alpha2.size(), "curve_energy");
  return 0.5 * detail::trapezoid(grid, [&](std::size_t i) {
    return c.alpha1[i] * c.alpha1[i] + c.alpha2[i] * c.alpha2[i];
  });
}

inline double curve_energy(const std::vector<double>& grid, const Controls2D& c) {
  detail::check_grid(grid.size(), c.alpha1.size(), "curve_energy");
  detail::check_grid(grid.size(), c.k.size(), "curve_energy");
  detail::check_grid(grid.size(), c.j.size(), "curve_energy");
  return 0.5 * detail::trapezoid(grid, [&](std::size_t i) {
    return c.alpha1[i] * c.alpha1[i] + c.k[i] * c.k[i] + c.j[i] * c.j[i];
  });
}

struct StepRecord {
  bool adaptive = true;
  double tolerance = 0;
  double fixed_step = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Time-indexed solution samples of one model's Hamiltonian flow.
template <class State, class Covector>
struct Trajectory {
  std::vector<double> s;  // integrator parameter, strictly increasing
  std::vector<State> states;
  std::vector<Covector> covectors;  // empty when the flow carried no covector
  StepRecord steps;
  double min_h = 0;         // smallest X1-coefficient (h or psi) seen
  bool complete = true;     // integrator reached the end of the span
  bool admissible = false;  // min_h stayed above the admissibility floor

  std::size_t size() const { return s.size(); }
  bool has_covectors() const { return !covectors.empty(); }
};

using Trajectory1D = Trajectory<State1D, Covector1D>;
using Trajectory2D = Trajectory<State2D, Covector2D>;

inline constexpr double kAdmissibleFloor = 1e-6;  // h (or psi) must exceed this

}  // namespace reachgeo
