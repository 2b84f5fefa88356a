#pragma once

// 6D kinematic-model geodesic flow on R^3_(t,x,y) x S^1_theta x R^2_(v,a).
//
// Momentum functions of the orthonormal horizontal frame:
//   P1 = v cos(theta) p_x + v sin(theta) p_y + a p_v + p_t,  P2 = p_theta,
//   P3 = p_a;  H = 1/2 (P1^2 + P2^2 + P3^2).
// Writing psi = P1, the normal geodesic equations are
//   t' = psi, x' = v cos(theta) psi, y' = v sin(theta) psi, theta' = p_theta,
//   v' = a psi, a' = p_a, p_x' = p_y' = p_t' = 0,
//   p_theta' = v (sin(theta) p_x - cos(theta) p_y) psi,
//   p_v' = -(cos(theta) p_x + sin(theta) p_y) psi,  p_a' = -p_v psi.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "reachgeo/engel1d.hpp"
#include "reachgeo/geomcore.hpp"
#include "reachgeo/odeint.hpp"
#include "reachgeo/quadrature.hpp"

namespace reachgeo::kin2d {

struct HamState2D {
  State2D state;
  Covector2D covector;

  std::array<double, 12> to_array() const {
    return {state.t,      state.x,      state.y,       state.theta,
            state.v,      state.a,      covector.p_t,  covector.p_x,
            covector.p_y, covector.p_theta, covector.p_v, covector.p_a};
  }
  static HamState2D from_array(const std::array<double, 12>& y) {
    return {{y[0], y[1], y[2], y[3], y[4], y[5]}, {y[6], y[7], y[8], y[9], y[10], y[11]}};
  }
};

inline double x1_coefficient(const std::array<double, 12>& y) {
  const double cp = std::cos(y[3]) * y[7] + std::sin(y[3]) * y[8];
  return y[4] * cp + y[5] * y[10] + y[6];  // psi
}

inline std::array<double, 3> momenta(const HamState2D& hs) {
  const auto y = hs.to_array();
  return {x1_coefficient(y), y[9], y[11]};
}

inline double hamiltonian(const HamState2D& hs) {
  const auto P = momenta(hs);
  return 0.5 * (P[0] * P[0] + P[1] * P[1] + P[2] * P[2]);
}

inline std::array<double, 12> ham_rhs(const std::array<double, 12>& y) {
  const double c = std::cos(y[3]), s = std::sin(y[3]);
  const double cp = c * y[7] + s * y[8];
  const double sp = s * y[7] - c * y[8];
  const double psi = y[4] * cp + y[5] * y[10] + y[6];
  return {psi,          y[4] * c * psi, y[4] * s * psi, y[9],
          y[5] * psi,   y[11],          0.0,            0.0,
          0.0,          y[4] * sp * psi, -cp * psi,     -y[10] * psi};
}

inline HamState2D ham_rhs(const HamState2D& hs) {
  return HamState2D::from_array(ham_rhs(hs.to_array()));
}

inline Trajectory2D flow(const HamState2D& initial, double span, const ode::StepControl& ctrl,
                         std::size_t nsamples = 0) {
  auto rhs = [](double, const std::array<double, 12>& y) { return ham_rhs(y); };
  auto sol = ode::integrate<12>(rhs, initial.to_array(), 0.0, span, ctrl);

  Trajectory2D traj;
  traj.complete = sol.complete();
  traj.steps.adaptive = ctrl.mode == ode::StepControl::Mode::adaptive;
  traj.steps.tolerance = ctrl.abs_tol;
  traj.steps.fixed_step = ctrl.step;
  traj.steps.accepted = sol.accepted;
  traj.steps.rejected = sol.rejected;

  auto emit = [&](double s, const std::array<double, 12>& y) {
    traj.s.push_back(s);
    traj.states.push_back(State2D::from_array({y[0], y[1], y[2], y[3], y[4], y[5]}));
    traj.covectors.push_back(Covector2D::from_array({y[6], y[7], y[8], y[9], y[10], y[11]}));
  };
  if (nsamples >= 2 && sol.complete()) {
    const double s1 = sol.back_s();
    for (std::size_t i = 0; i < nsamples; ++i) {
      const double s = s1 * double(i) / double(nsamples - 1);
      emit(s, sol.at(s));
    }
  } else {
    for (std::size_t i = 0; i < sol.s.size(); ++i) emit(sol.s[i], sol.y[i]);
  }
  double min_psi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sol.s.size(); ++i)
    min_psi = std::min(min_psi, x1_coefficient(sol.y[i]));
  traj.min_h = min_psi;
  traj.admissible = traj.complete && min_psi > kAdmissibleFloor;
  return traj;
}

/// Admissible controls of a flowed trajectory over its time grid:
/// alpha1 = 1, k = p_theta / psi, j = p_a / psi. Requires psi > 0.
inline std::pair<std::vector<double>, Controls2D> admissible_controls(const Trajectory2D& traj) {
  std::vector<double> tgrid;
  Controls2D c;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto y = HamState2D{traj.states[i], traj.covectors[i]}.to_array();
    const double psi = x1_coefficient(y);
    if (!(psi > 0)) throw std::domain_error("admissible_controls: psi must stay positive");
    tgrid.push_back(traj.states[i].t);
    c.alpha1.push_back(1.0);
    c.k.push_back(y[9] / psi);
    c.j.push_back(y[11] / psi);
  }
  return {tgrid, c};
}

/// Frame controls in the flow parameter: (psi, p_theta, p_a).
inline std::pair<std::vector<double>, Controls2D> frame_controls(const Trajectory2D& traj) {
  Controls2D c;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto y = HamState2D{traj.states[i], traj.covectors[i]}.to_array();
    c.alpha1.push_back(x1_coefficient(y));
    c.k.push_back(y[9]);
    c.j.push_back(y[11]);
  }
  return {traj.s, c};
}

struct InfeasibleCurvature : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConnectivityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Constant curvature plus cubic jerk connecting controls.
struct ControlPolynomials2D {
  double k = 0;
  double j0 = 0, j1 = 0, j2 = 0, j3 = 0;

  double jerk(double t) const { return j0 + j1 * t + j2 * t * t / 2 + j3 * t * t * t / 6; }

  /// Closed-form (theta, v, a) and quadrature (x, y) of the admissible curve
  /// from `start` (taken at t = 0).
  State2D eval(const State2D& start, double t, std::size_t quad_order = 32) const {
    const double th = start.theta + k * t;
    const double a = start.a + j0 * t + j1 * t * t / 2 + j2 * t * t * t / 6 +
                     j3 * t * t * t * t / 24;
    const double v = start.v + start.a * t + j0 * t * t / 2 + j1 * t * t * t / 6 +
                     j2 * t * t * t * t / 24 + j3 * t * t * t * t * t / 120;
    auto rule = quad::gauss_legendre(quad_order);
    auto vel = [&](double u) {
      return start.v + start.a * u + j0 * u * u / 2 + j1 * u * u * u / 6 +
             j2 * u * u * u * u / 24 + j3 * u * u * u * u * u / 120;
    };
    const double x =
        start.x + quad::integrate(rule, [&](double u) { return vel(u) * std::cos(start.theta + k * u); },
                                  0.0, t);
    const double y =
        start.y + quad::integrate(rule, [&](double u) { return vel(u) * std::sin(start.theta + k * u); },
                                  0.0, t);
    return {start.t + t, x, y, th, v, a};
  }
};

/// Admissible connection from `start` (t=0) to `target` (t=1) with the given
/// constant curvature. Throws InfeasibleCurvature when theta0 + k does not
/// land on theta1 (mod 2pi, tolerance 1e-6 rad) or, for k = 0, when the
/// target leaves the heading ray. Throws ConnectivityError when the moment
/// system is numerically singular.
inline ControlPolynomials2D connect_admissible(const State2D& start, const State2D& target,
                                               double k) {
  const double wrap_gap = wrap_angle(start.theta + k - target.theta);
  if (std::abs(wrap_gap) > 1e-6)
    throw InfeasibleCurvature("connect_admissible_2d: theta0 + k misses theta1 by " +
                              std::to_string(wrap_gap) + " rad");

  const double dxt = target.x - start.x, dyt = target.y - start.y;
  if (std::abs(k) < 1e-12) {
    // curvature-free motion stays on the heading ray; reduce to the 1D solve
    const double c = std::cos(start.theta), s = std::sin(start.theta);
    const double transverse = dxt * s - dyt * c;
    const double scale = std::max(1.0, std::hypot(dxt, dyt));
    if (std::abs(transverse) > 1e-9 * scale)
      throw InfeasibleCurvature(
          "connect_admissible_2d: k = 0 but target is off the heading ray (transverse gap " +
          std::to_string(transverse) + ")");
    const double along = dxt * c + dyt * s;
    auto jp = engel1d::connect_admissible(along - (start.v + start.a / 2),
                                          target.v - (start.v + start.a),
                                          target.a - start.a);
    return {0.0, jp.e0, jp.e1, jp.e2, 0.0};
  }

  auto rule = quad::gauss_legendre(32);
  // basis responses of a(1), v(1), x(1), y(1) to each jerk coefficient
  auto a_base = [](int i, double t) {
    static const double f[] = {1, 2, 6, 24};
    return std::pow(t, i + 1) / f[i];
  };
  auto v_base = [](int i, double t) {
    static const double f[] = {2, 6, 24, 120};
    return std::pow(t, i + 2) / f[i];
  };
  Eigen::Matrix4d M;
  Eigen::Vector4d rhs;
  for (int i = 0; i < 4; ++i) {
    M(0, i) = a_base(i, 1.0);
    M(1, i) = v_base(i, 1.0);
    M(2, i) = quad::integrate(rule, [&](double u) {
      return v_base(i, u) * std::cos(start.theta + k * u);
    });
    M(3, i) = quad::integrate(rule, [&](double u) {
      return v_base(i, u) * std::sin(start.theta + k * u);
    });
  }
  auto v_free = [&](double u) { return start.v + start.a * u; };
  rhs(0) = target.a - start.a;
  rhs(1) = target.v - (start.v + start.a);
  rhs(2) = dxt - quad::integrate(rule, [&](double u) { return v_free(u) * std::cos(start.theta + k * u); });
  rhs(3) = dyt - quad::integrate(rule, [&](double u) { return v_free(u) * std::sin(start.theta + k * u); });

  Eigen::JacobiSVD<Eigen::Matrix4d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double cond = svd.singularValues()(0) / svd.singularValues()(3);
  if (!(cond < 1e12))
    throw ConnectivityError("connect_admissible_2d: singular moment system, condition number " +
                            std::to_string(cond));
  Eigen::Vector4d j = svd.solve(rhs);
  return {k, j(0), j(1), j(2), j(3)};
}

/// Time-parameterized fiber rates (theta', a') of a normal geodesic from the
/// origin, valid while psi^2 = p_t^2 + k^2 + p_a(0)^2 - p_theta^2 - p_a^2
/// stays positive. k plays the role of p_theta(0).
class Reparam2D {
 public:
  struct SmallCovector {
    double p_x = 0, p_y = 0, p_v0 = 0;
  };

  Reparam2D(double p_t, double k, double p_a0, const SmallCovector& sc,
            double max_horizon = 100.0)
      : C_(p_t * p_t + k * k + p_a0 * p_a0) {
    if (!(p_t > 0)) throw std::invalid_argument("reparam_2d: requires p_t > 0");
    auto rhs = [&, sc](double, const std::array<double, 8>& z) {
      // z = (x, y, theta, v, a, p_v, p_theta, p_a)
      const double c = std::cos(z[2]), s = std::sin(z[2]);
      const double psi = std::sqrt(std::max(C_ - z[6] * z[6] - z[7] * z[7], 1e-300));
      return std::array<double, 8>{z[3] * c,
                                   z[3] * s,
                                   z[6] / psi,
                                   z[4],
                                   z[7] / psi,
                                   -(c * sc.p_x + s * sc.p_y),
                                   z[3] * (s * sc.p_x - c * sc.p_y),
                                   -z[5]};
    };
    auto guard = std::function<bool(const std::array<double, 8>&)>(
        [this](const std::array<double, 8>& z) {
          return C_ - z[6] * z[6] - z[7] * z[7] > 1e-12 * C_;
        });
    std::array<double, 8> z0{0, 0, 0, 0, 0, sc.p_v0, k, p_a0};
    sol_ = ode::integrate<8>(rhs, z0, 0.0, max_horizon, ode::StepControl::adaptive(1e-12), guard);
    horizon_ = sol_.back_s();
  }

  double horizon() const { return horizon_; }
  double constant() const { return C_; }

  std::array<double, 2> rates(double t) const {
    if (t < 0 || t > horizon_)
      throw std::domain_error("reparam_2d: t beyond admissibility horizon");
    const auto z = sol_.at(t);
    const double psi = std::sqrt(std::max(C_ - z[6] * z[6] - z[7] * z[7], 1e-300));
    return {z[6] / psi, z[7] / psi};
  }

  /// full reduced state (x, y, theta, v, a, p_v, p_theta, p_a) at time t
  std::array<double, 8> state(double t) const {
    if (t < 0 || t > horizon_)
      throw std::domain_error("reparam_2d: t beyond admissibility horizon");
    return sol_.at(t);
  }

 private:
  double C_;
  double horizon_ = 0;
  ode::Solution<8> sol_;
};

}  // namespace reachgeo::kin2d
