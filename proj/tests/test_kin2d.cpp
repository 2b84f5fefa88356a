#include "doctest.h"
#include "reachgeo/kin2d.hpp"

#include <cmath>
#include <random>

using namespace reachgeo;
using kin2d::HamState2D;

namespace {
std::mt19937_64 rng(7151);
double uni(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

HamState2D origin_with(double pt, double px, double py, double pth, double pv, double pa) {
  return {{0, 0, 0, 0, 0, 0}, {pt, px, py, pth, pv, pa}};
}

HamState2D random_small_covector() {
  return origin_with(uni(0.5, 2.0), uni(-0.5, 0.5), uni(-0.5, 0.5), uni(-0.5, 0.5),
                     uni(-0.5, 0.5), uni(-0.5, 0.5));
}
}  // namespace

TEST_CASE("momenta at simple points") {
  auto P = kin2d::momenta(origin_with(1, 0, 0, 0, 0, 0));
  CHECK(P[0] == 1.0);
  CHECK(P[1] == 0.0);
  CHECK(P[2] == 0.0);

  HamState2D hs{{0, 0, 0, 0, 1, 0}, {0, 2, 0, 0, 0, 0}};
  CHECK(kin2d::momenta(hs)[0] == 2.0);
}

TEST_CASE("momenta equal covector paired with the frame fields") {
  for (int trial = 0; trial < 30; ++trial) {
    HamState2D hs{{uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-3, 3), uni(-1, 1), uni(-1, 1)},
                  {uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1)}};
    auto F = eval_fields_2d(hs.state);
    const auto pc = hs.covector;
    // pair covector with a frame row ordered (t,x,y,theta,v,a)
    auto pair_with = [&](const std::array<double, 6>& X) {
      return pc.p_t * X[0] + pc.p_x * X[1] + pc.p_y * X[2] + pc.p_theta * X[3] + pc.p_v * X[4] +
             pc.p_a * X[5];
    };
    auto P = kin2d::momenta(hs);
    CHECK(P[0] == doctest::Approx(pair_with(F[0])).epsilon(1e-12));
    CHECK(P[1] == doctest::Approx(pair_with(F[1])).epsilon(1e-12));
    CHECK(P[2] == doctest::Approx(pair_with(F[2])).epsilon(1e-12));
  }
}

TEST_CASE("rhs: pure time flow freezes the hand") {
  auto d = kin2d::ham_rhs(origin_with(1, 0, 0, 0, 0, 0));
  CHECK(d.state.t == 1.0);
  CHECK(d.state.x == 0.0);
  CHECK(d.state.y == 0.0);
  CHECK(d.state.theta == 0.0);
  CHECK(d.state.v == 0.0);
  CHECK(d.state.a == 0.0);
}

TEST_CASE("rhs equals the symplectic gradient of H by finite differences") {
  for (int trial = 0; trial < 20; ++trial) {
    HamState2D hs{{uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-2, 2), uni(-1, 1), uni(-1, 1)},
                  {uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1)}};
    auto y = hs.to_array();
    auto d = kin2d::ham_rhs(y);
    const double eps = 1e-6;
    for (int i = 0; i < 12; ++i) {
      auto yp = y, ym = y;
      yp[i] += eps;
      ym[i] -= eps;
      const double dH = (kin2d::hamiltonian(HamState2D::from_array(yp)) -
                         kin2d::hamiltonian(HamState2D::from_array(ym))) /
                        (2 * eps);
      const double expect = i < 6 ? d[i + 6] : d[i - 6];
      const double got = i < 6 ? -dH : dH;
      CHECK(std::abs(got - expect) < 1e-6);
    }
  }
}

TEST_CASE("rhs reduces to the 1d system on the embedded slice") {
  for (int trial = 0; trial < 20; ++trial) {
    const double t = uni(-1, 1), x = uni(-1, 1), v = uni(-1, 1), a = uni(-1, 1);
    const double pt = uni(-1, 1), px = uni(-1, 1), pv = uni(-1, 1), pa = uni(-1, 1);
    auto d2 = kin2d::ham_rhs(HamState2D{{t, x, 0, 0, v, a}, {pt, px, 0, 0, pv, pa}});
    auto d1 = engel1d::ham_rhs(engel1d::HamState1D{{t, x, v, a}, {pt, px, pv, pa}});
    CHECK(d2.state.t == doctest::Approx(d1.state.t).epsilon(1e-14));
    CHECK(d2.state.x == doctest::Approx(d1.state.x).epsilon(1e-14));
    CHECK(d2.state.y == 0.0);
    CHECK(d2.state.theta == 0.0);
    CHECK(d2.state.v == doctest::Approx(d1.state.v).epsilon(1e-14));
    CHECK(d2.state.a == doctest::Approx(d1.state.a).epsilon(1e-14));
    CHECK(d2.covector.p_v == doctest::Approx(d1.covector.p_v).epsilon(1e-14));
    CHECK(d2.covector.p_a == doctest::Approx(d1.covector.p_a).epsilon(1e-14));
    CHECK(d2.covector.p_theta == 0.0);
  }
}

TEST_CASE("flow conserves H, the linear momenta, and psi^2+p_theta^2+p_a^2") {
  for (int trial = 0; trial < 10; ++trial) {
    auto hs = random_small_covector();
    auto traj = kin2d::flow(hs, 1.0, ode::StepControl::adaptive(1e-10));
    REQUIRE(traj.complete);
    const double H0 = kin2d::hamiltonian(hs);
    double dH = 0, dp = 0, dC = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      HamState2D cur{traj.states[i], traj.covectors[i]};
      dH = std::max(dH, std::abs(kin2d::hamiltonian(cur) - H0));
      dp = std::max(dp, std::abs(cur.covector.p_t - hs.covector.p_t));
      dp = std::max(dp, std::abs(cur.covector.p_x - hs.covector.p_x));
      dp = std::max(dp, std::abs(cur.covector.p_y - hs.covector.p_y));
      auto P = kin2d::momenta(cur);
      dC = std::max(dC, std::abs(P[0] * P[0] + P[1] * P[1] + P[2] * P[2] - 2 * H0));
    }
    CHECK(dH <= 1e-8);
    CHECK(dp <= 1e-10);
    CHECK(dC <= 1e-8);
  }
}

TEST_CASE("planar speed consistency: sqrt(x'^2+y'^2) = |v psi| along flows") {
  auto hs = random_small_covector();
  auto traj = kin2d::flow(hs, 1.0, ode::StepControl::adaptive(1e-10));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    auto y = HamState2D{traj.states[i], traj.covectors[i]}.to_array();
    auto d = kin2d::ham_rhs(y);
    const double planar = std::hypot(d[1], d[2]);
    CHECK(std::abs(planar - std::abs(y[4] * kin2d::x1_coefficient(y))) <= 1e-8);
  }
}

TEST_CASE("zero transverse momentum keeps theta frozen and the path straight") {
  const double th0 = 5 * M_PI / 6;
  // p_theta = 0 and p aligned with the heading: sin(th0) p_x = cos(th0) p_y
  const double pmag = 0.4;
  HamState2D hs{{0, 0, 0, th0, 0, 0},
                {1.0, pmag * std::cos(th0), pmag * std::sin(th0), 0.0, 0.3, 0.2}};
  auto traj = kin2d::flow(hs, 1.0, ode::StepControl::adaptive(1e-10));
  REQUIRE(traj.complete);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(std::abs(traj.states[i].theta - th0) <= 1e-10);
    const double det = traj.states[i].x * std::sin(th0) - traj.states[i].y * std::cos(th0);
    CHECK(std::abs(det) <= 1e-8);
  }

  // matches the 1d flow rotated by th0
  engel1d::HamState1D h1{{0, 0, 0, 0}, {1.0, pmag, 0.3, 0.2}};
  auto t1 = engel1d::flow(h1, 1.0, ode::StepControl::adaptive(1e-10), 33);
  auto t2 = kin2d::flow(hs, 1.0, ode::StepControl::adaptive(1e-10), 33);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(std::abs(t2.states[i].t - t1.states[i].t) <= 1e-8);
    CHECK(std::abs(t2.states[i].x - t1.states[i].x * std::cos(th0)) <= 1e-8);
    CHECK(std::abs(t2.states[i].y - t1.states[i].x * std::sin(th0)) <= 1e-8);
    CHECK(std::abs(t2.states[i].v - t1.states[i].v) <= 1e-8);
    CHECK(std::abs(t2.states[i].a - t1.states[i].a) <= 1e-8);
  }
}

TEST_CASE("connect_admissible: matching endpoints give zero controls") {
  State2D start{0, 0.3, -0.2, 0.5, 0, 0};
  State2D target = start;
  target.t = 1;
  auto cp = kin2d::connect_admissible(start, target, 0.0);
  CHECK(cp.k == 0.0);
  CHECK(std::abs(cp.j0) < 1e-12);
  CHECK(std::abs(cp.j1) < 1e-12);
  CHECK(std::abs(cp.j2) < 1e-12);
  CHECK(std::abs(cp.j3) < 1e-12);
}

namespace {
// independent oracle: integrate the admissible control system with the ODE
// solver and compare endpoints
State2D integrate_controls(const State2D& start, const kin2d::ControlPolynomials2D& cp) {
  auto rhs = [&](double t, const std::array<double, 5>& z) {
    // z = (x, y, theta, v, a)
    return std::array<double, 5>{z[3] * std::cos(z[2]), z[3] * std::sin(z[2]), cp.k, z[4],
                                 cp.jerk(t)};
  };
  auto sol = ode::integrate<5>(rhs, {start.x, start.y, start.theta, start.v, start.a}, 0.0, 1.0,
                               ode::StepControl::adaptive(1e-12));
  return {start.t + 1.0, sol.y.back()[0], sol.y.back()[1], sol.y.back()[2], sol.y.back()[3],
          sol.y.back()[4]};
}
}  // namespace

TEST_CASE("connect_admissible with k = 0 reduces to the 1d solve") {
  State2D start{0, 0, 0, 0, 0.2, -0.1};
  State2D target{1, 0.8, 0, 0, 0.4, 0.3};
  auto cp = kin2d::connect_admissible(start, target, 0.0);
  CHECK(cp.j3 == 0.0);
  auto end = integrate_controls(start, cp);
  CHECK(std::abs(end.x - target.x) <= 1e-8);
  CHECK(std::abs(end.v - target.v) <= 1e-8);
  CHECK(std::abs(end.a - target.a) <= 1e-8);
}

TEST_CASE("connect_admissible reproduces random targets under forward integration") {
  for (int trial = 0; trial < 20; ++trial) {
    State2D start{0, uni(-1, 1), uni(-1, 1), uni(-2, 2), uni(-0.5, 0.5), uni(-1, 1)};
    State2D target{1, start.x + uni(-0.5, 0.5), start.y + uni(-0.5, 0.5),
                   start.theta + uni(-2, 2), uni(-0.5, 0.5), uni(-1, 1)};
    const double k = target.theta - start.theta;
    if (std::abs(k) < 0.05) continue;  // k = 0 covered separately
    auto cp = kin2d::connect_admissible(start, target, k);
    auto end = integrate_controls(start, cp);
    CHECK(std::abs(end.x - target.x) <= 1e-8);
    CHECK(std::abs(end.y - target.y) <= 1e-8);
    CHECK(std::abs(end.theta - target.theta) <= 1e-10);
    CHECK(std::abs(end.v - target.v) <= 1e-8);
    CHECK(std::abs(end.a - target.a) <= 1e-8);
  }
}

TEST_CASE("connect_admissible rejects inconsistent curvature and off-ray k=0 targets") {
  State2D start{0, 0, 0, 0.3, 0, 0};
  State2D target{1, 1, 0, 1.0, 0, 0};
  CHECK_THROWS_AS(kin2d::connect_admissible(start, target, 0.2), kin2d::InfeasibleCurvature);

  State2D t2{1, 0.5, 0.4, 0.3, 0, 0};  // off the heading ray for k = 0
  CHECK_THROWS_AS(kin2d::connect_admissible(start, t2, 0.0), kin2d::InfeasibleCurvature);
}

TEST_CASE("reparam_2d: zero small momenta give flat rates with clamped horizon") {
  kin2d::Reparam2D rp(1.0, 0.0, 0.0, {}, 50.0);
  CHECK(rp.horizon() == 50.0);
  auto r = rp.rates(12.5);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
  CHECK_THROWS_AS(kin2d::Reparam2D(0.0, 0.1, 0.1, {}), std::invalid_argument);
}

TEST_CASE("reparam_2d cross-validates against the full flow on [0, T/2]") {
  const double pt = 1.0, k = 0.3, pa0 = -0.2;
  kin2d::Reparam2D::SmallCovector sc{0.15, -0.1, 0.2};
  kin2d::Reparam2D rp(pt, k, pa0, sc, 20.0);

  auto traj = kin2d::flow(origin_with(pt, sc.p_x, sc.p_y, k, sc.p_v0, pa0), 1.0,
                          ode::StepControl::adaptive(1e-12));
  REQUIRE(traj.complete);
  REQUIRE(traj.states.back().t < rp.horizon());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.states[i].t;
    if (t > rp.horizon() / 2) break;
    auto z = rp.state(t);
    CHECK(std::abs(z[0] - traj.states[i].x) <= 1e-6);
    CHECK(std::abs(z[1] - traj.states[i].y) <= 1e-6);
    CHECK(std::abs(z[2] - traj.states[i].theta) <= 1e-6);
    CHECK(std::abs(z[3] - traj.states[i].v) <= 1e-6);
    CHECK(std::abs(z[4] - traj.states[i].a) <= 1e-6);
  }
}

TEST_CASE("reparam_2d finds a finite horizon when the fiber momenta saturate") {
  // strong p_v0 drives p_a outside the budget in finite time
  kin2d::Reparam2D rp(0.6, 0.0, 0.0, {0.0, 0.0, 2.0}, 100.0);
  CHECK(rp.horizon() < 100.0);
  auto z = rp.state(rp.horizon());
  const double rad = rp.constant() - z[6] * z[6] - z[7] * z[7];
  CHECK(rad >= 0.0);
  CHECK(rad <= 1e-6 * rp.constant());
}
