#include "doctest.h"
#include "reachgeo/regularity.hpp"

#include <cmath>

using namespace reachgeo;
using regularity::CurveFamily;

namespace {
regularity::ScalarFn constant(double c) {
  return [c](double) { return c; };
}
}  // namespace

TEST_CASE("matrices match the printed forms for the three families") {
  auto m1 = regularity::build_matrices(CurveFamily::x3_integral, constant(0), constant(0),
                                       constant(1), constant(0));
  Eigen::Matrix3d A1 = m1.A(0.3);
  CHECK(A1(1, 0) == 1.0);
  CHECK(A1.cwiseAbs().sum() == 1.0);
  CHECK(m1.B(0.3).isZero(0.0));

  auto m2 = regularity::build_matrices(CurveFamily::fiber_kj, constant(1), constant(2),
                                       constant(0.5), constant(0));
  Eigen::Matrix3d A2 = m2.A(0.0);
  CHECK(A2(0, 0) == -1.0);
  CHECK(A2(1, 0) == 2.0);
  CHECK(A2.col(1).isZero(0.0));
  CHECK(A2.col(2).isZero(0.0));
  Eigen::Matrix3d B2 = m2.B(0.0);
  CHECK(B2(0, 2) == doctest::Approx(-1.0 / 0.5));
  CHECK(B2(2, 0) == doctest::Approx(0.5));
  CHECK(B2(1, 1) == 0.0);

  auto m3 = regularity::build_matrices(CurveFamily::admissible, constant(0.7), constant(-0.4),
                                       constant(2.0), constant(0.6));
  Eigen::Matrix3d A3 = m3.A(0.0);
  CHECK(A3(0, 0) == doctest::Approx(-0.7));
  CHECK(A3(0, 1) == 1.0);
  CHECK(A3(1, 0) == doctest::Approx(-0.4));
  CHECK(A3(1, 2) == 1.0);
  Eigen::Matrix3d B3 = m3.B(0.0);
  CHECK(B3(0, 0) == doctest::Approx(0.3));
  CHECK(B3(0, 2) == doctest::Approx(-0.35));
  CHECK(B3(2, 0) == doctest::Approx(1.4));
  CHECK(B3(2, 1) == -1.0);
}

TEST_CASE("v = 0 raises a singular-frame error where division is required") {
  auto m = regularity::build_matrices(CurveFamily::fiber_kj, constant(1), constant(1),
                                      constant(0), constant(0));
  CHECK_THROWS_AS(m.B(0.1), std::domain_error);
}

TEST_CASE("X3-integral curves are singular with a constant witness") {
  auto m = regularity::build_matrices(CurveFamily::x3_integral, constant(0), constant(0),
                                      constant(1), constant(0));
  auto cls = regularity::classify(m, 0.0, 1.0, 64);
  CHECK(cls.singular);
  CHECK(cls.witness_min_norm >= 1e-6);
  CHECK(cls.constraint_residual <= 1e-8);
  // witness stays constant (B = 0) and annihilates A: second component zero
  for (const auto& lam : cls.witness) {
    CHECK(std::abs(lam(1)) <= 1e-10);
    CHECK(std::abs((lam - cls.witness.front()).norm()) <= 1e-10);
  }
}

TEST_CASE("fiber curve k=1, j=2cos(s) is singular; witness solves the printed system") {
  // (j/k)' compatibility holds for this pair, so a nonvanishing witness with
  // constant second component exists: Lambda ~ (2 cos s, 1, -2 sin s / v)
  const double v0 = 1.0;
  auto m = regularity::build_matrices(
      CurveFamily::fiber_kj, constant(1.0), [](double s) { return 2.0 * std::cos(s); },
      constant(v0), constant(0));
  auto cls = regularity::classify(m, 0.0, 1.0, 64);
  CHECK(cls.singular);
  CHECK(cls.witness_min_norm >= 1e-6);
  CHECK(cls.constraint_residual <= 1e-8);
  REQUIRE(!cls.witness.empty());
  // check proportionality to the analytic witness
  const auto& w0 = cls.witness.front();
  const double scale = w0(1);  // lambda_2 is constant along the true witness
  REQUIRE(std::abs(scale) > 1e-8);
  for (std::size_t i = 0; i < cls.witness.size(); ++i) {
    const double s = cls.s[i];
    Eigen::RowVector3d expect(2 * std::cos(s), 1.0, -2 * std::sin(s) / v0);
    CHECK((cls.witness[i] / scale - expect).norm() <= 1e-6);
  }
}

TEST_CASE("admissible curves are regular; the only grid solution is zero") {
  auto m = regularity::build_matrices(
      CurveFamily::admissible, constant(0.8), [](double s) { return 1.0 + 0.5 * s; },
      constant(1.2), constant(0.4));
  auto cls = regularity::classify(m, 0.0, 1.0, 64);
  CHECK(!cls.singular);
  CHECK(cls.grid_solution_norm <= 1e-10);
  CHECK(cls.separation > 1e-4);  // clear margin between zero and the best candidate
}

TEST_CASE("verdicts are stable under grid refinement") {
  auto m1 = regularity::build_matrices(CurveFamily::x3_integral, constant(0), constant(0),
                                       constant(1), constant(0));
  auto m2 = regularity::build_matrices(
      CurveFamily::fiber_kj, constant(1.0), [](double s) { return 2.0 * std::cos(s); },
      constant(1.0), constant(0));
  auto m3 = regularity::build_matrices(
      CurveFamily::admissible, constant(0.8), [](double s) { return 1.0 + 0.5 * s; },
      constant(1.2), constant(0.4));
  for (std::size_t n : {64u, 128u}) {
    CHECK(regularity::classify(m1, 0, 1, n).singular);
    CHECK(regularity::classify(m2, 0, 1, n).singular);
    CHECK(!regularity::classify(m3, 0, 1, n).singular);
  }
}

TEST_CASE("sampled-control construction classifies like the exact one") {
  const std::size_t n = 129;
  std::vector<double> ks(n), js(n), vs(n), as(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = double(i) / double(n - 1);
    ks[i] = 1.0;
    js[i] = 2.0 * std::cos(s);
    vs[i] = 1.0;
    as[i] = 0.0;
  }
  auto m = regularity::build_matrices(CurveFamily::fiber_kj, 0.0, 1.0, ks, js, vs, as);
  auto cls = regularity::classify(m, 0.0, 1.0, 64);
  CHECK(cls.singular);
  CHECK(cls.constraint_residual <= 1e-8);
}

TEST_CASE("holonomy spot check: X3-integral reachable set is the second axis") {
  // V_V' = -B V_V - A V_H with B = 0 and A(:,0) = (0,1,0):
  // V_V(1) = (0, -int v_H1, 0)
  auto m = regularity::build_matrices(CurveFamily::x3_integral, constant(0), constant(0),
                                      constant(1), constant(0));
  auto vh1 = [](double s) { return std::sin(3 * s) + 0.3; };
  auto rhs = [&](double s, const std::array<double, 3>& w) {
    Eigen::Vector3d vv(w[0], w[1], w[2]);
    Eigen::Vector3d vh(vh1(s), 0.25, -0.5);
    Eigen::Vector3d d = -m.B(s) * vv - m.A(s) * vh;
    return std::array<double, 3>{d(0), d(1), d(2)};
  };
  auto sol = ode::integrate<3>(rhs, {0, 0, 0}, 0.0, 1.0, ode::StepControl::adaptive(1e-12));
  REQUIRE(sol.complete());
  // quadrature oracle for -int v_H1
  double acc = 0;
  const int nq = 20001;
  for (int i = 0; i < nq; ++i) {
    const double s = double(i) / (nq - 1);
    const double w = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
    acc += w * vh1(s) / (nq - 1);
  }
  CHECK(std::abs(sol.y.back()[0]) <= 1e-12);
  CHECK(std::abs(sol.y.back()[2]) <= 1e-12);
  CHECK(sol.y.back()[1] == doctest::Approx(-acc).epsilon(1e-7));
}
