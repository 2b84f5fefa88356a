#include "doctest.h"
#include "reachgeo/odeint.hpp"

#include <cmath>

using namespace reachgeo;

namespace {
using Vec1 = std::array<double, 1>;
using Vec2 = std::array<double, 2>;
}  // namespace

TEST_CASE("zero rhs gives exactly constant solution") {
  auto rhs = [](double, const Vec2& ) { return Vec2{0.0, 0.0}; };
  Vec2 y0{3.5, -2.25};
  for (auto mode : {ode::StepControl::adaptive(1e-10), ode::StepControl::fixed_step(0.01)}) {
    auto sol = ode::integrate<2>(rhs, y0, 0.0, 2.0, mode);
    REQUIRE(sol.complete());
    for (const auto& y : sol.y) {
      CHECK(y[0] == 3.5);
      CHECK(y[1] == -2.25);
    }
  }
}

TEST_CASE("exponential growth hits e at 1e-8 with adaptive tol 1e-10") {
  auto rhs = [](double, const Vec1& y) { return Vec1{y[0]}; };
  auto sol = ode::integrate<1>(rhs, Vec1{1.0}, 0.0, 1.0, ode::StepControl::adaptive(1e-10));
  REQUIRE(sol.complete());
  CHECK(std::abs(sol.y.back()[0] - std::exp(1.0)) < 1e-8);
}

TEST_CASE("harmonic oscillator energy drift over 10 periods") {
  auto rhs = [](double, const Vec2& y) { return Vec2{y[1], -y[0]}; };
  const double T = 10 * 2 * M_PI;
  auto sol = ode::integrate<2>(rhs, Vec2{1.0, 0.0}, 0.0, T, ode::StepControl::adaptive(1e-10));
  REQUIRE(sol.complete());
  double drift = 0;
  for (std::size_t i = 0; i < sol.s.size(); ++i) {
    const double E = 0.5 * (sol.y[i][0] * sol.y[i][0] + sol.y[i][1] * sol.y[i][1]);
    drift = std::max(drift, std::abs(E - 0.5));
  }
  CHECK(drift <= 1e-8);
}

TEST_CASE("fixed-step order is at least 3.8 by Richardson") {
  auto rhs = [](double s, const Vec1& y) { return Vec1{std::cos(s) * y[0]}; };
  auto err_at = [&](double h) {
    auto sol = ode::integrate<1>(rhs, Vec1{1.0}, 0.0, 2.0, ode::StepControl::fixed_step(h));
    return std::abs(sol.y.back()[0] - std::exp(std::sin(2.0)));
  };
  const double e1 = err_at(0.02), e2 = err_at(0.01);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.8);
}

TEST_CASE("adaptive samples stay in span and increase strictly") {
  auto rhs = [](double, const Vec2& y) { return Vec2{y[1], -std::sin(y[0])}; };
  auto sol = ode::integrate<2>(rhs, Vec2{1.2, 0.0}, -1.0, 3.0, ode::StepControl::adaptive(1e-8));
  REQUIRE(sol.complete());
  CHECK(sol.s.front() == -1.0);
  CHECK(sol.s.back() == 3.0);
  for (std::size_t i = 1; i < sol.s.size(); ++i) CHECK(sol.s[i] > sol.s[i - 1]);
}

TEST_CASE("dense output interpolates to 4th-order accuracy") {
  auto rhs = [](double, const Vec1& y) { return Vec1{y[0]}; };
  auto sol = ode::integrate<1>(rhs, Vec1{1.0}, 0.0, 1.0, ode::StepControl::fixed_step(0.025));
  double worst = 0;
  for (int i = 0; i <= 200; ++i) {
    const double s = i / 200.0;
    worst = std::max(worst, std::abs(sol.at(s)[0] - std::exp(s)));
  }
  CHECK(worst < 3e-8);
}

TEST_CASE("max_steps exceeded returns partial solution with status") {
  auto rhs = [](double, const Vec1& y) { return Vec1{y[0]}; };
  ode::StepControl ctrl = ode::StepControl::fixed_step(1e-4);
  ctrl.max_steps = 10;
  auto sol = ode::integrate<1>(rhs, Vec1{1.0}, 0.0, 1.0, ctrl);
  CHECK(sol.status == ode::Status::max_steps_exceeded);
}

TEST_CASE("guard rejection drives step to min_step and reports partial run") {
  auto rhs = [](double, const Vec1&) { return Vec1{1.0}; };
  // forbid y >= 0.5: integration must stop near there with partial samples
  auto guard = std::function<bool(const Vec1&)>([](const Vec1& y) { return y[0] < 0.5; });
  auto sol = ode::integrate<1>(rhs, Vec1{0.0}, 0.0, 1.0, ode::StepControl::adaptive(1e-10), guard);
  CHECK(sol.status == ode::Status::min_step_reached);
  CHECK(sol.y.back()[0] <= 0.5);
  CHECK(sol.y.back()[0] > 0.45);
}
