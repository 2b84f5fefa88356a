#pragma once

// Two-point boundary-value solver for the geodesic flows: root-finding on the
// unknown initial covector beta0 so that the flow started at (alpha0, beta0)
// hits the fixed final coordinates at the end of the unit parameter span,
//   G(beta0) = (gamma_i,beta0(1)) - alpha1.
//
// Start generation, in deterministic order:
//   1. caller-supplied warm starts;
//   2. a presolve seed from the time-reparameterized admissible flow
//      (gauge psi(0) = 1, target continuation from the free-flow endpoint,
//      rescaled to the unit parameter span);
//   3. a lattice of small covectors scaled by delta, first admissibility-
//      guarded, then unguarded (solutions whose h/psi changes sign are legal
//      BVP solutions but are flagged inadmissible).
// Candidates are evaluated in fixed-size batches (parallel inside a batch)
// and reduced lexicographically by (converged, residual, index); scanning
// stops after the first batch that produced a converged result.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "reachgeo/engel1d.hpp"
#include "reachgeo/geomcore.hpp"
#include "reachgeo/kin2d.hpp"
#include "reachgeo/odeint.hpp"
#include "reachgeo/parallel.hpp"

namespace reachgeo::shooting {

enum class Model { engel1d, kin2d, kin2d_theta_frozen };

inline std::size_t state_dim(Model m) { return m == Model::engel1d ? 4 : 6; }
inline const char* model_name(Model m) {
  switch (m) {
    case Model::engel1d: return "1d";
    case Model::kin2d: return "2d";
    default: return "2d-theta-frozen";
  }
}

struct Condition {
  enum class Kind { fixed, free, interval };
  Kind kind = Kind::free;
  double value = 0;
  double lo = 0, hi = 0;

  static Condition fixed(double v) { return {Kind::fixed, v, 0, 0}; }
  static Condition free() { return {}; }
  static Condition interval(double lo, double hi) { return {Kind::interval, 0, lo, hi}; }
};

/// Boundary data per coordinate, in model order (t,x,v,a) or (t,x,y,theta,v,a).
struct BoundarySpec {
  Model model = Model::engel1d;
  std::vector<Condition> initial;
  std::vector<Condition> final;
  double theta_frozen = 0;  // heading for kin2d_theta_frozen

  /// Static validation; an empty list means the spec is solvable as posed.
  std::vector<std::string> validate() const {
    std::vector<std::string> issues;
    const std::size_t n = state_dim(model);
    if (initial.size() != n || final.size() != n) {
      issues.push_back("expected " + std::to_string(n) + " initial and final conditions, got " +
                       std::to_string(initial.size()) + "/" + std::to_string(final.size()));
      return issues;
    }
    auto coord_name = [&](std::size_t i) {
      static const char* n1[] = {"t", "x", "v", "a"};
      static const char* n2[] = {"t", "x", "y", "theta", "v", "a"};
      return model == Model::engel1d ? n1[i] : n2[i];
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (initial[i].kind == Condition::Kind::free)
        issues.push_back(std::string("initial ") + coord_name(i) +
                         " must be fixed (or an interval expanded by the caller)");
      for (const Condition* c : {&initial[i], &final[i]}) {
        if (c->kind == Condition::Kind::interval) {
          const std::string nm = coord_name(i);
          if (nm != "theta" && nm != "a")
            issues.push_back("intervals allowed only on theta/accel (found on " + nm + ")");
          if (!(c->lo <= c->hi)) issues.push_back("empty interval on " + nm);
        }
      }
    }
    // square system: every unknown covector component needs a fixed final
    std::size_t n_fixed = 0;
    for (const auto& c : final)
      if (c.kind == Condition::Kind::fixed) ++n_fixed;
    if (model == Model::kin2d_theta_frozen) {
      // theta rides along frozen; the other five must be fixed, and the
      // positions collapse onto the heading ray (one effective coordinate)
      for (std::size_t i = 0; i < n; ++i)
        if (coord_name(i) != std::string("theta") && final[i].kind != Condition::Kind::fixed)
          issues.push_back(std::string("final ") + coord_name(i) +
                           " must be fixed in the theta-frozen model");
      if (final[3].kind == Condition::Kind::fixed &&
          std::abs(wrap_angle(final[3].value - theta_frozen)) > 1e-9)
        issues.push_back("final theta disagrees with the frozen heading");
      if (initial[3].kind == Condition::Kind::fixed &&
          std::abs(wrap_angle(initial[3].value - theta_frozen)) > 1e-9)
        issues.push_back("initial theta disagrees with the frozen heading");
    } else if (n_fixed != n) {
      issues.push_back("non-square system: " + std::to_string(n) + " unknown covector components vs " +
                       std::to_string(n_fixed) + " fixed final coordinates (mismatch " +
                       std::to_string(n > n_fixed ? n - n_fixed : n_fixed - n) + ")");
    }
    return issues;
  }

  std::vector<double> initial_values() const {
    std::vector<double> v;
    for (const auto& c : initial) v.push_back(c.value);
    return v;
  }
  std::vector<double> final_values() const {
    std::vector<double> v;
    for (const auto& c : final) v.push_back(c.value);
    return v;
  }
};

/// Center-out 1D reach: alpha0 = (0, x0, 0, 0), alpha1 = (1, x1, 0, 0).
inline BoundarySpec bc_center_out_1d(double x0, double x1) {
  BoundarySpec s;
  s.model = Model::engel1d;
  s.initial = {Condition::fixed(0), Condition::fixed(x0), Condition::fixed(0),
               Condition::fixed(0)};
  s.final = {Condition::fixed(1), Condition::fixed(x1), Condition::fixed(0),
             Condition::fixed(0)};
  return s;
}

/// Straight planar reach with frozen heading.
inline BoundarySpec bc_straight_2d(double theta, double x1, double y1) {
  BoundarySpec s;
  s.model = Model::kin2d_theta_frozen;
  s.theta_frozen = theta;
  s.initial = {Condition::fixed(0), Condition::fixed(0), Condition::fixed(0),
               Condition::fixed(theta), Condition::fixed(0), Condition::fixed(0)};
  s.final = {Condition::fixed(1), Condition::fixed(x1), Condition::fixed(y1),
             Condition::free(), Condition::fixed(0), Condition::fixed(0)};
  return s;
}

/// Fully prescribed 2D reach between eta0 (t=0) and eta1 (t=1).
inline BoundarySpec bc_prescribed_2d(const State2D& eta0, const State2D& eta1) {
  BoundarySpec s;
  s.model = Model::kin2d;
  s.initial = {Condition::fixed(0), Condition::fixed(eta0.x), Condition::fixed(eta0.y),
               Condition::fixed(eta0.theta), Condition::fixed(eta0.v), Condition::fixed(eta0.a)};
  s.final = {Condition::fixed(1), Condition::fixed(eta1.x), Condition::fixed(eta1.y),
             Condition::fixed(eta1.theta), Condition::fixed(eta1.v), Condition::fixed(eta1.a)};
  return s;
}

struct SolveOptions {
  double tol = 1e-8;             // accept when ||G|| (L2) drops below this
  double delta = 0.5;            // lattice scale, p_t forced positive
  int max_iterations = 200;
  int max_halvings = 20;
  double fd_step = 1e-6;         // relative finite-difference step
  ode::StepControl flow = ode::StepControl::adaptive(1e-10);
  std::size_t trajectory_samples = 401;
  bool use_presolve = true;
  bool use_lattice = true;
  bool allow_inadmissible = true;
  std::size_t batch = 16;        // fixed batch size keeps reductions deterministic
  std::vector<std::vector<double>> warm_starts;  // tried before everything else
};

struct ShootingResult {
  Model model = Model::engel1d;
  std::vector<double> beta0;     // covector in model layout
  double residual_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  bool admissible = false;
  double min_h = -std::numeric_limits<double>::infinity();
  int start_index = -1;          // index into the candidate list (0 = first warm start)
  std::size_t candidates_tried = 0;
  std::vector<double> residual_trace;  // winning candidate's Newton history
  std::string note;
  std::variant<Trajectory1D, Trajectory2D> trajectory;
  double length = std::numeric_limits<double>::quiet_NaN();
  double energy = std::numeric_limits<double>::quiet_NaN();
  double hamiltonian0 = std::numeric_limits<double>::quiet_NaN();
  double hamiltonian_drift = std::numeric_limits<double>::quiet_NaN();

  const Trajectory1D& traj1d() const { return std::get<Trajectory1D>(trajectory); }
  const Trajectory2D& traj2d() const { return std::get<Trajectory2D>(trajectory); }
};

namespace detail {

struct Eval {
  Eigen::VectorXd residual;
  double min_h = -std::numeric_limits<double>::infinity();
  bool finite = false;
  double norm() const { return finite ? residual.norm() : std::numeric_limits<double>::infinity(); }
};

// ---- model-specific residual evaluators ----------------------------------

inline Eval eval_1d(const std::vector<double>& a0, const std::vector<double>& a1,
                    const Eigen::VectorXd& beta, const ode::StepControl& ctrl) {
  std::array<double, 8> y0{a0[0], a0[1], a0[2], a0[3], beta(0), beta(1), beta(2), beta(3)};
  auto rhs = [](double, const std::array<double, 8>& y) { return engel1d::ham_rhs(y); };
  auto sol = ode::integrate<8>(rhs, y0, 0.0, 1.0, ctrl);
  Eval ev;
  if (!sol.complete()) return ev;
  ev.min_h = std::numeric_limits<double>::infinity();
  for (const auto& y : sol.y) ev.min_h = std::min(ev.min_h, engel1d::x1_coefficient(y));
  const auto& ye = sol.y.back();
  ev.residual.resize(4);
  for (int i = 0; i < 4; ++i) ev.residual(i) = ye[i] - a1[i];
  ev.finite = ev.residual.allFinite();
  return ev;
}

inline Eval eval_2d(const std::vector<double>& a0, const std::vector<double>& a1,
                    const Eigen::VectorXd& beta, const ode::StepControl& ctrl) {
  std::array<double, 12> y0{a0[0], a0[1], a0[2], a0[3], a0[4], a0[5],
                            beta(0), beta(1), beta(2), beta(3), beta(4), beta(5)};
  auto rhs = [](double, const std::array<double, 12>& y) { return kin2d::ham_rhs(y); };
  auto sol = ode::integrate<12>(rhs, y0, 0.0, 1.0, ctrl);
  Eval ev;
  if (!sol.complete()) return ev;
  ev.min_h = std::numeric_limits<double>::infinity();
  for (const auto& y : sol.y) ev.min_h = std::min(ev.min_h, kin2d::x1_coefficient(y));
  const auto& ye = sol.y.back();
  ev.residual.resize(6);
  for (int i = 0; i < 6; ++i) ev.residual(i) = ye[i] - a1[i];
  ev.finite = ev.residual.allFinite();
  return ev;
}

using EvalFn = std::function<Eval(const Eigen::VectorXd&)>;

// ---- damped Newton with optional admissibility guard ----------------------

struct NewtonOutcome {
  Eigen::VectorXd beta;
  double res_norm = std::numeric_limits<double>::infinity();
  double min_h = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

inline NewtonOutcome finish(NewtonOutcome& out, const Eigen::VectorXd& beta, double ng,
                            const Eval& cur, int iters, double tol);

inline NewtonOutcome newton(const EvalFn& eval, Eigen::VectorXd beta, const SolveOptions& opts,
                            bool guard_admissible) {
  NewtonOutcome out;
  out.beta = beta;
  Eval cur = eval(beta);
  if (!cur.finite || (guard_admissible && !(cur.min_h > 0))) return out;
  double ng = cur.norm();
  out.trace.push_back(ng);
  const int n = int(beta.size());
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (ng <= opts.tol) break;
    Eigen::MatrixXd J(cur.residual.size(), n);
    for (int i = 0; i < n; ++i) {
      const double h = opts.fd_step * std::max(1.0, std::abs(beta(i)));
      Eigen::VectorXd bp = beta;
      bp(i) += h;
      Eval ep = eval(bp);
      if (!ep.finite) {  // one-sided the other way
        bp(i) = beta(i) - h;
        ep = eval(bp);
        if (!ep.finite) return finish(out, beta, ng, cur, it, opts.tol);
        J.col(i) = (cur.residual - ep.residual) / h;
      } else {
        J.col(i) = (ep.residual - cur.residual) / h;
      }
    }
    Eigen::VectorXd d = J.fullPivLu().solve(-cur.residual);
    if (!d.allFinite()) return finish(out, beta, ng, cur, it, opts.tol);
    double alpha = 1.0;
    bool improved = false;
    for (int half = 0; half < opts.max_halvings; ++half) {
      Eigen::VectorXd bn = beta + alpha * d;
      Eval en = eval(bn);
      const bool ok = en.finite && (!guard_admissible || en.min_h > 0);
      if (ok && en.norm() < ng) {
        beta = bn;
        cur = en;
        ng = en.norm();
        out.trace.push_back(ng);
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    out.iterations = it + 1;
    if (!improved) break;
  }
  return finish(out, beta, ng, cur, out.iterations, opts.tol);
}

inline NewtonOutcome finish(NewtonOutcome& out, const Eigen::VectorXd& beta, double ng,
                            const Eval& cur, int iters, double tol) {
  out.beta = beta;
  out.res_norm = ng;
  out.min_h = cur.min_h;
  out.iterations = iters;
  out.converged = ng <= tol;
  return out;
}

// ---- time-domain presolve --------------------------------------------------

// 1D reduced flow in the time variable with gauge h(0) = 1:
// p_a(t) is the exact quadratic, a' = p_a / sqrt(C - p_a^2).
struct Presolve1D {
  std::array<double, 3> start;   // (x, v, a) at t = 0
  double C(const Eigen::Vector3d& w) const {
    return 1.0 + w(2) * w(2);  // h(0)^2 + p_a(0)^2 with h(0) = 1
  }
  Eval operator()(const std::array<double, 3>& target, const Eigen::VectorXd& w) const {
    const double px = w(0), pv0 = w(1), pa0 = w(2);
    const double Cc = 1.0 + pa0 * pa0;
    auto rhs = [&](double t, const std::array<double, 3>& z) {
      const double pa = px * t * t / 2 - pv0 * t + pa0;
      const double r = Cc - pa * pa;
      if (r <= 0)
        return std::array<double, 3>{std::numeric_limits<double>::quiet_NaN(), 0, 0};
      return std::array<double, 3>{z[1], z[2], pa / std::sqrt(r)};
    };
    auto sol = ode::integrate<3>(rhs, start, 0.0, 1.0, ode::StepControl::adaptive(1e-11));
    Eval ev;
    if (!sol.complete()) return ev;
    ev.residual.resize(3);
    for (int i = 0; i < 3; ++i) ev.residual(i) = sol.y.back()[i] - target[i];
    ev.finite = ev.residual.allFinite();
    ev.min_h = 1.0;
    return ev;
  }
};

// 2D reduced flow in the time variable with gauge psi(0) = 1:
// z = (x, y, theta, v, a, p_v, p_theta, p_a), unknowns (p_x, p_y, p_th0, p_v0, p_a0).
struct Presolve2D {
  std::array<double, 5> start;  // (x, y, theta, v, a) at t = 0
  Eval operator()(const std::array<double, 5>& target, const Eigen::VectorXd& w) const {
    const double px = w(0), py = w(1), pth0 = w(2), pv0 = w(3), pa0 = w(4);
    const double Cc = 1.0 + pth0 * pth0 + pa0 * pa0;
    auto rhs = [&](double, const std::array<double, 8>& z) {
      const double r = Cc - z[6] * z[6] - z[7] * z[7];
      if (r <= 0)
        return std::array<double, 8>{std::numeric_limits<double>::quiet_NaN(), 0, 0, 0,
                                     0, 0, 0, 0};
      const double psi = std::sqrt(r);
      const double c = std::cos(z[2]), s = std::sin(z[2]);
      return std::array<double, 8>{z[3] * c,          z[3] * s, z[6] / psi, z[4],
                                   z[7] / psi,        -(c * px + s * py),
                                   z[3] * (s * px - c * py), -z[5]};
    };
    std::array<double, 8> z0{start[0], start[1], start[2], start[3], start[4], pv0, pth0, pa0};
    auto sol = ode::integrate<8>(rhs, z0, 0.0, 1.0, ode::StepControl::adaptive(1e-11));
    Eval ev;
    if (!sol.complete()) return ev;
    ev.residual.resize(5);
    for (int i = 0; i < 5; ++i) ev.residual(i) = sol.y.back()[i] - target[i];
    ev.finite = ev.residual.allFinite();
    ev.min_h = 1.0;
    return ev;
  }
};

// continuation from the zero-control free endpoint toward the true target
template <class Reduced, std::size_t NT>
std::optional<Eigen::VectorXd> continue_to_target(const Reduced& red,
                                                  const std::array<double, NT>& free_end,
                                                  const std::array<double, NT>& target,
                                                  int wdim, const SolveOptions& opts,
                                                  std::string* note) {
  SolveOptions nopts = opts;
  nopts.tol = 1e-10;
  nopts.max_iterations = 80;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(wdim);
  double sigma = 0.0, step = 0.25;
  int legs = 0;
  while (sigma < 1.0) {
    if (++legs > 200) {
      if (note) *note += "presolve: continuation exceeded leg budget; ";
      return std::nullopt;
    }
    const double s_try = std::min(1.0, sigma + step);
    std::array<double, NT> tgt;
    for (std::size_t i = 0; i < NT; ++i)
      tgt[i] = (1 - s_try) * free_end[i] + s_try * target[i];
    auto eval = [&](const Eigen::VectorXd& ww) { return red(tgt, ww); };
    auto res = newton(eval, w, nopts, false);
    if (res.converged || res.res_norm <= 1e-9) {
      w = res.beta;
      sigma = s_try;
      step = std::min(0.25, step * 2);
    } else {
      step /= 2;
      if (step < 2e-3) {
        if (note)
          *note += "presolve: continuation stalled at sigma = " + std::to_string(sigma) + "; ";
        return std::nullopt;
      }
    }
  }
  return w;
}

}  // namespace detail

/// Boundary residual G(beta0) for a fully fixed spec (the spec order).
inline Eigen::VectorXd residual(const std::vector<double>& beta0, const BoundarySpec& spec,
                                const SolveOptions& opts = {}) {
  auto issues = spec.validate();
  if (!issues.empty())
    throw std::invalid_argument("residual: invalid spec: " + issues.front());
  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(beta0.data(), beta0.size());
  if (spec.model == Model::engel1d) {
    auto ev = detail::eval_1d(spec.initial_values(), spec.final_values(), beta, opts.flow);
    return ev.residual;
  }
  if (spec.model == Model::kin2d) {
    auto ev = detail::eval_2d(spec.initial_values(), spec.final_values(), beta, opts.flow);
    return ev.residual;
  }
  throw std::invalid_argument("residual: use solve_constrained_theta for the frozen model");
}

namespace detail {

inline std::vector<Eigen::VectorXd> lattice_starts(int dim, double delta) {
  const double eps = delta / 100.0;
  std::vector<std::vector<double>> axis(dim);
  axis[0] = {eps, delta};  // p_t forced positive
  for (int i = 1; i < dim; ++i) axis[i] = {-delta, eps, delta};
  std::vector<Eigen::VectorXd> out;
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = axis[i][idx[i]];
    out.push_back(v);
    int c = dim - 1;
    while (c >= 0 && ++idx[c] == axis[c].size()) idx[c--] = 0;
    if (c < 0) break;
  }
  return out;
}

struct Candidate {
  Eigen::VectorXd beta;
  bool guarded = false;
};

// batched multi-start scan; returns the winner by (converged, residual, index)
inline NewtonOutcome scan(const EvalFn& eval, const std::vector<Candidate>& cands,
                          const SolveOptions& opts, int* winner_index,
                          std::size_t* tried) {
  NewtonOutcome best;
  int best_index = -1;
  std::size_t done = 0;
  for (std::size_t b0 = 0; b0 < cands.size(); b0 += opts.batch) {
    const std::size_t b1 = std::min(cands.size(), b0 + opts.batch);
    std::vector<NewtonOutcome> outs(b1 - b0);
    par::for_each_index(b0, b1, [&](std::size_t i) {
      outs[i - b0] = newton(eval, cands[i].beta, opts, cands[i].guarded);
    });
    done += b1 - b0;
    for (std::size_t i = b0; i < b1; ++i) {
      const auto& o = outs[i - b0];
      const bool better = (o.converged && !best.converged) ||
                          (o.converged == best.converged && o.res_norm < best.res_norm);
      if (better) {
        best = o;
        best_index = int(i);
      }
    }
    if (best.converged) break;  // deterministic: batch boundaries are fixed
  }
  if (winner_index) *winner_index = best_index;
  if (tried) *tried = done;
  return best;
}

}  // namespace detail

/// Solve the two-point BVP posed by `spec` (all state coordinates fixed at
/// both ends). Returns the best result found; `converged` means the residual
/// dropped below opts.tol, `admissible` that h (or psi) stayed positive.
inline ShootingResult solve(const BoundarySpec& spec, const SolveOptions& opts = {});

/// 2D solve with the constraint theta' = 0: the reduced system is the 1D flow
/// along the frozen heading. The target must lie on the heading ray.
inline ShootingResult solve_constrained_theta(const BoundarySpec& spec, double theta_fixed,
                                              const SolveOptions& opts = {});

namespace detail {

inline void attach_trajectory_1d(ShootingResult& r, const std::vector<double>& a0,
                                 const SolveOptions& opts) {
  engel1d::HamState1D h0{{a0[0], a0[1], a0[2], a0[3]},
                         {r.beta0[0], r.beta0[1], r.beta0[2], r.beta0[3]}};
  auto traj = engel1d::flow(h0, 1.0, opts.flow, opts.trajectory_samples);
  r.hamiltonian0 = engel1d::hamiltonian(h0);
  double drift = 0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    drift = std::max(drift, std::abs(engel1d::hamiltonian({traj.states[i], traj.covectors[i]}) -
                                     r.hamiltonian0));
  r.hamiltonian_drift = drift;
  auto [grid, controls] = engel1d::frame_controls(traj);
  r.length = curve_length(grid, controls);
  r.energy = curve_energy(grid, controls);
  r.min_h = traj.min_h;
  r.admissible = traj.admissible;
  r.trajectory = std::move(traj);
}

inline void attach_trajectory_2d(ShootingResult& r, const std::vector<double>& a0,
                                 const SolveOptions& opts) {
  kin2d::HamState2D h0{{a0[0], a0[1], a0[2], a0[3], a0[4], a0[5]},
                       {r.beta0[0], r.beta0[1], r.beta0[2], r.beta0[3], r.beta0[4], r.beta0[5]}};
  auto traj = kin2d::flow(h0, 1.0, opts.flow, opts.trajectory_samples);
  r.hamiltonian0 = kin2d::hamiltonian(h0);
  double drift = 0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    drift = std::max(drift, std::abs(kin2d::hamiltonian({traj.states[i], traj.covectors[i]}) -
                                     r.hamiltonian0));
  r.hamiltonian_drift = drift;
  auto [grid, controls] = kin2d::frame_controls(traj);
  r.length = curve_length(grid, controls);
  r.energy = curve_energy(grid, controls);
  r.min_h = traj.min_h;
  r.admissible = traj.admissible;
  r.trajectory = std::move(traj);
}

}  // namespace detail

inline ShootingResult solve(const BoundarySpec& spec, const SolveOptions& opts) {
  ShootingResult result;
  result.model = spec.model;
  auto issues = spec.validate();
  if (!issues.empty()) throw std::invalid_argument("solve: invalid spec: " + issues.front());
  if (spec.model == Model::kin2d_theta_frozen)
    return solve_constrained_theta(spec, spec.theta_frozen, opts);

  const auto a0 = spec.initial_values();
  const auto a1 = spec.final_values();
  const bool is1d = spec.model == Model::engel1d;
  const int dim = is1d ? 4 : 6;

  detail::EvalFn eval = [&](const Eigen::VectorXd& b) {
    return is1d ? detail::eval_1d(a0, a1, b, opts.flow) : detail::eval_2d(a0, a1, b, opts.flow);
  };

  // candidate list: warm starts, presolve seed, lattice (guarded then not)
  std::vector<detail::Candidate> cands;
  for (const auto& w : opts.warm_starts)
    if (int(w.size()) == dim)
      cands.push_back({Eigen::Map<const Eigen::VectorXd>(w.data(), dim), true});

  bool presolve_stalled = false;
  if (opts.use_presolve) {
    std::optional<Eigen::VectorXd> seed;
    if (is1d && a0[0] == 0.0 && a1[0] == 1.0) {
      detail::Presolve1D red{{a0[1], a0[2], a0[3]}};
      // free endpoint of the zero-control flow started at (x0, v0, a0)
      std::array<double, 3> ez{a0[1] + a0[2] + a0[3] / 2, a0[2] + a0[3], a0[3]};
      std::array<double, 3> tgt{a1[1], a1[2], a1[3]};
      auto w = detail::continue_to_target(red, ez, tgt, 3, opts, &result.note);
      if (w) {
        // rescale: lambda = integral dt / h with h = sqrt(C - p_a(t)^2)
        const double px = (*w)(0), pv0 = (*w)(1), pa0 = (*w)(2);
        const double C = 1.0 + pa0 * pa0;
        double lam = 0;
        const int nq = 4000;
        auto hinv = [&](double t) {
          const double pa = px * t * t / 2 - pv0 * t + pa0;
          return 1.0 / std::sqrt(std::max(C - pa * pa, 1e-12));
        };
        for (int i = 0; i < nq; ++i) {
          const double t0 = double(i) / nq, t1 = double(i + 1) / nq;
          lam += 0.5 * (hinv(t0) + hinv(t1)) / nq;
        }
        const double pt_gauge = 1.0 - a0[2] * px - a0[3] * pv0;
        Eigen::VectorXd b(4);
        b << lam * pt_gauge, lam * px, lam * pv0, lam * pa0;
        seed = b;
      } else {
        presolve_stalled = true;
      }
    } else if (!is1d && a0[0] == 0.0 && a1[0] == 1.0) {
      detail::Presolve2D red{{a0[1], a0[2], a0[3], a0[4], a0[5]}};
      const double th0 = a0[3], v0 = a0[4], ac0 = a0[5];
      std::array<double, 5> ez{a0[1] + (v0 + ac0 / 2) * std::cos(th0),
                               a0[2] + (v0 + ac0 / 2) * std::sin(th0), th0, v0 + ac0, ac0};
      std::array<double, 5> tgt{a1[1], a1[2], a1[3], a1[4], a1[5]};
      auto w = detail::continue_to_target(red, ez, tgt, 5, opts, &result.note);
      if (w) {
        const double px = (*w)(0), py = (*w)(1), pth0 = (*w)(2), pv0 = (*w)(3), pa0 = (*w)(4);
        const double C = 1.0 + pth0 * pth0 + pa0 * pa0;
        // lambda from one reduced integration pass
        auto rhs = [&](double, const std::array<double, 8>& z) {
          const double r = std::max(C - z[6] * z[6] - z[7] * z[7], 1e-12);
          const double psi = std::sqrt(r);
          const double c = std::cos(z[2]), s = std::sin(z[2]);
          return std::array<double, 8>{z[3] * c,          z[3] * s, z[6] / psi, z[4],
                                       z[7] / psi,        -(c * px + s * py),
                                       z[3] * (s * px - c * py), -z[5]};
        };
        std::array<double, 8> z0{a0[1], a0[2], a0[3], a0[4], a0[5], pv0, pth0, pa0};
        auto sol = ode::integrate<8>(rhs, z0, 0.0, 1.0, ode::StepControl::adaptive(1e-11));
        double lam = 0;
        for (std::size_t i = 1; i < sol.s.size(); ++i) {
          auto psi_at = [&](std::size_t k) {
            return std::sqrt(
                std::max(C - sol.y[k][6] * sol.y[k][6] - sol.y[k][7] * sol.y[k][7], 1e-12));
          };
          lam += 0.5 * (sol.s[i] - sol.s[i - 1]) * (1 / psi_at(i) + 1 / psi_at(i - 1));
        }
        const double cp0 = std::cos(th0) * px + std::sin(th0) * py;
        const double pt_gauge = 1.0 - v0 * cp0 - ac0 * pv0;
        Eigen::VectorXd b(6);
        b << lam * pt_gauge, lam * px, lam * py, lam * pth0, lam * pv0, lam * pa0;
        seed = b;
      } else {
        presolve_stalled = true;
      }
    }
    if (seed) cands.push_back({*seed, true});
  }

  if (opts.use_lattice) {
    auto lat = detail::lattice_starts(dim, opts.delta);
    // admissible-seeking pass is pointless when the presolve proved the
    // admissible branch unreachable; go straight to the unguarded pass
    if (!presolve_stalled)
      for (const auto& b : lat) cands.push_back({b, true});
    if (opts.allow_inadmissible)
      for (const auto& b : lat) cands.push_back({b, false});
  }

  if (cands.empty()) {
    result.note += "no start candidates; ";
    return result;
  }

  int winner = -1;
  std::size_t tried = 0;
  auto best = detail::scan(eval, cands, opts, &winner, &tried);
  result.beta0.assign(best.beta.data(), best.beta.data() + best.beta.size());
  result.residual_norm = best.res_norm;
  result.iterations = best.iterations;
  result.converged = best.converged || best.res_norm <= opts.tol;
  result.residual_trace = best.trace;
  result.start_index = winner;
  result.candidates_tried = tried;
  if (!result.converged) result.note += "no start converged; best residual kept; ";
  if (is1d)
    detail::attach_trajectory_1d(result, a0, opts);
  else
    detail::attach_trajectory_2d(result, a0, opts);
  return result;
}

inline ShootingResult solve_constrained_theta(const BoundarySpec& spec, double theta_fixed,
                                              const SolveOptions& opts) {
  ShootingResult result;
  result.model = Model::kin2d_theta_frozen;
  BoundarySpec frozen = spec;
  frozen.model = Model::kin2d_theta_frozen;
  frozen.theta_frozen = theta_fixed;
  auto issues = frozen.validate();
  if (!issues.empty())
    throw std::invalid_argument("solve_constrained_theta: invalid spec: " + issues.front());

  const auto a0 = frozen.initial_values();
  const auto a1 = frozen.final_values();
  const double c = std::cos(theta_fixed), s = std::sin(theta_fixed);
  const double dx = a1[1] - a0[1], dy = a1[2] - a0[2];
  const double transverse = dx * s - dy * c;
  const double scale = std::max(1.0, std::hypot(dx, dy));
  if (std::abs(transverse) > 1e-9 * scale) {
    result.note = "target off the frozen heading ray (transverse gap " +
                  std::to_string(transverse) + "); no solution exists";
    result.residual_norm = std::abs(transverse);
    result.trajectory = Trajectory2D{};
    return result;
  }

  // reduce to the 1D problem in the along-heading displacement d
  BoundarySpec spec1d;
  spec1d.model = Model::engel1d;
  spec1d.initial = {Condition::fixed(a0[0]), Condition::fixed(0), Condition::fixed(a0[4]),
                    Condition::fixed(a0[5])};
  spec1d.final = {Condition::fixed(a1[0]), Condition::fixed(dx * c + dy * s),
                  Condition::fixed(a1[4]), Condition::fixed(a1[5])};
  SolveOptions o1 = opts;
  o1.warm_starts.clear();
  for (const auto& w : opts.warm_starts)
    if (w.size() == 6)  // project a 2D warm start onto the reduced layout
      o1.warm_starts.push_back({w[0], c * w[1] + s * w[2], w[4], w[5]});
  auto r1 = solve(spec1d, o1);

  result.beta0 = {r1.beta0[0], c * r1.beta0[1], s * r1.beta0[1], 0.0, r1.beta0[2], r1.beta0[3]};
  result.residual_norm = r1.residual_norm;
  result.iterations = r1.iterations;
  result.converged = r1.converged;
  result.residual_trace = r1.residual_trace;
  result.start_index = r1.start_index;
  result.candidates_tried = r1.candidates_tried;
  result.note += r1.note;
  result.min_h = r1.min_h;
  result.admissible = r1.admissible;
  result.length = r1.length;
  result.energy = r1.energy;
  result.hamiltonian0 = r1.hamiltonian0;
  result.hamiltonian_drift = r1.hamiltonian_drift;

  // lift the 1D trajectory onto the frozen-heading plane curve
  const auto& t1 = r1.traj1d();
  Trajectory2D t2;
  t2.s = t1.s;
  t2.steps = t1.steps;
  t2.min_h = t1.min_h;
  t2.complete = t1.complete;
  t2.admissible = t1.admissible;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    const auto& st = t1.states[i];
    const auto& cv = t1.covectors[i];
    t2.states.push_back({st.t, a0[1] + st.x * c, a0[2] + st.x * s, theta_fixed, st.v, st.a});
    t2.covectors.push_back({cv.p_t, cv.p_x * c, cv.p_x * s, 0.0, cv.p_v, cv.p_a});
  }
  result.trajectory = std::move(t2);
  return result;
}

}  // namespace reachgeo::shooting
