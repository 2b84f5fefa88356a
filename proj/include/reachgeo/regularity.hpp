#pragma once

// Regular/singular classification of horizontal curves in the 6D model via
// the admissibility system V_V' = -B V_V - A V_H. A curve is singular iff a
// row field Lambda(s) != 0 solves Lambda' = Lambda B with Lambda A = 0.
//
// The three curve families and their printed matrices (frame X4, X5, X6
// completing the horizontal frame, metric making all six orthonormal):
//   X3-integral:      A = [[0,0,0],[1,0,0],[0,0,0]],          B = 0
//   k X2 + j X3:      A = [[-k,0,0],[j,0,0],[0,0,0]],
//                     B = [[0,0,-k/v],[0,0,0],[k v,0,0]]
//   admissible:       A = [[-k,1,0],[j,0,1],[0,0,0]],
//                     B = [[a/v,0,-k/v],[0,0,0],[k v,-1,0]]
// The entries with 1/v require v != 0 along the classified interval.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "reachgeo/odeint.hpp"

namespace reachgeo::regularity {

enum class CurveFamily { x3_integral, fiber_kj, admissible };

using ScalarFn = std::function<double(double)>;

struct AdmissibilityMatrices {
  CurveFamily family;
  std::function<Eigen::Matrix3d(double)> A;
  std::function<Eigen::Matrix3d(double)> B;
};

namespace detail {

// cubic Hermite interpolation on a uniform grid with 4th-order finite
// difference slopes, so sampled inputs keep the classifier at its tolerance
class Interp {
 public:
  Interp() = default;
  Interp(double s0, double s1, std::vector<double> f) : s0_(s0), s1_(s1), f_(std::move(f)) {
    const std::size_t n = f_.size();
    if (n < 5) throw std::invalid_argument("sampled controls need at least 5 points");
    h_ = (s1_ - s0_) / double(n - 1);
    d_.resize(n);
    const double ih = 1.0 / (12.0 * h_);
    d_[0] = (-25 * f_[0] + 48 * f_[1] - 36 * f_[2] + 16 * f_[3] - 3 * f_[4]) * ih;
    d_[1] = (-3 * f_[0] - 10 * f_[1] + 18 * f_[2] - 6 * f_[3] + f_[4]) * ih;
    for (std::size_t i = 2; i + 2 < n; ++i)
      d_[i] = (f_[i - 2] - 8 * f_[i - 1] + 8 * f_[i + 1] - f_[i + 2]) * ih;
    d_[n - 2] = (3 * f_[n - 1] + 10 * f_[n - 2] - 18 * f_[n - 3] + 6 * f_[n - 4] - f_[n - 5]) * ih;
    d_[n - 1] =
        (25 * f_[n - 1] - 48 * f_[n - 2] + 36 * f_[n - 3] - 16 * f_[n - 4] + 3 * f_[n - 5]) * ih;
  }

  double operator()(double s) const {
    const std::size_t n = f_.size();
    double u = (s - s0_) / h_;
    std::size_t i = std::min<std::size_t>(n - 2, std::size_t(std::max(0.0, std::floor(u))));
    u -= double(i);
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * f_[i] + (u3 - 2 * u2 + u) * h_ * d_[i] +
           (-2 * u3 + 3 * u2) * f_[i + 1] + (u3 - u2) * h_ * d_[i + 1];
  }

 private:
  double s0_ = 0, s1_ = 1, h_ = 1;
  std::vector<double> f_, d_;
};

inline void require_nonzero_v(double v, double s) {
  if (std::abs(v) < 1e-12)
    throw std::domain_error("build_matrices: frame entries need v != 0 (v vanishes at s = " +
                            std::to_string(s) + ")");
}

}  // namespace detail

/// Matrices of the admissibility system for one of the paper's families,
/// with the controls/state supplied as functions of the parameter.
inline AdmissibilityMatrices build_matrices(CurveFamily family, ScalarFn k, ScalarFn j,
                                            ScalarFn v, ScalarFn a) {
  AdmissibilityMatrices m;
  m.family = family;
  switch (family) {
    case CurveFamily::x3_integral:
      m.A = [](double) {
        Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
        A(1, 0) = 1.0;
        return A;
      };
      m.B = [](double) { return Eigen::Matrix3d::Zero(); };
      break;
    case CurveFamily::fiber_kj:
      m.A = [k, j](double s) {
        Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
        A(0, 0) = -k(s);
        A(1, 0) = j(s);
        return A;
      };
      m.B = [k, v](double s) {
        detail::require_nonzero_v(v(s), s);
        Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
        B(0, 2) = -k(s) / v(s);
        B(2, 0) = k(s) * v(s);
        return B;
      };
      break;
    case CurveFamily::admissible:
      m.A = [k, j](double s) {
        Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
        A(0, 0) = -k(s);
        A(0, 1) = 1.0;
        A(1, 0) = j(s);
        A(1, 2) = 1.0;
        return A;
      };
      m.B = [k, v, a](double s) {
        detail::require_nonzero_v(v(s), s);
        Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
        B(0, 0) = a(s) / v(s);
        B(0, 2) = -k(s) / v(s);
        B(2, 0) = k(s) * v(s);
        B(2, 1) = -1.0;
        return B;
      };
      break;
  }
  return m;
}

/// Same, from controls/state sampled on a uniform grid over [s0, s1].
inline AdmissibilityMatrices build_matrices(CurveFamily family, double s0, double s1,
                                            const std::vector<double>& k,
                                            const std::vector<double>& j,
                                            const std::vector<double>& v,
                                            const std::vector<double>& a) {
  detail::Interp ik(s0, s1, k), ij(s0, s1, j), iv(s0, s1, v), ia(s0, s1, a);
  return build_matrices(
      family, [ik](double s) { return ik(s); }, [ij](double s) { return ij(s); },
      [iv](double s) { return iv(s); }, [ia](double s) { return ia(s); });
}

struct Classification {
  bool singular = false;
  // witness diagnostics (all on the classification grid)
  double constraint_residual = 0;  // max_i ||Lambda(s_i) A(s_i)||_inf of the best candidate
  double witness_min_norm = 0;     // min_i ||Lambda(s_i)||
  double grid_solution_norm = 0;   // max_i ||Lambda(s_i)|| over accepted witnesses (0 if none)
  double separation = 0;           // smallest singular value of the stacked constraint operator
  std::vector<double> s;
  std::vector<Eigen::RowVector3d> witness;  // nonempty iff singular
};

inline constexpr double kConstraintTol = 1e-8;
inline constexpr double kNonvanishingFloor = 1e-6;

/// Witness search by subspace propagation: seed with the left kernel of
/// A(s0), push each basis row through Lambda' = Lambda B with the shared
/// integrator, then pick the combination that best satisfies Lambda A = 0 on
/// the whole grid. Singular iff that combination meets the constraint to
/// 1e-8 with norm never below 1e-6.
inline Classification classify(const AdmissibilityMatrices& m, double s0, double s1,
                               std::size_t nsamples = 128) {
  if (nsamples < 2) throw std::invalid_argument("classify: need at least 2 samples");
  Classification out;
  out.s.resize(nsamples);
  const double step = (s1 - s0) / double(nsamples - 1);
  for (std::size_t i = 0; i < nsamples; ++i) out.s[i] = s0 + step * double(i);

  // left kernel of A(s0): rows lambda with lambda A = 0  <=>  A^T lambda^T = 0
  Eigen::Matrix3d A0 = m.A(s0);
  Eigen::JacobiSVD<Eigen::Matrix3d> asvd(A0.transpose(), Eigen::ComputeFullV);
  const double amax = asvd.singularValues()(0);
  std::vector<Eigen::Vector3d> basis;
  for (int c = 0; c < 3; ++c)
    if (asvd.singularValues()(c) <= 1e-12 * std::max(amax, 1.0)) basis.push_back(asvd.matrixV().col(c));
  if (basis.empty()) return out;  // constraint subspace empty: vacuously regular

  // propagate each basis row through Lambda' = Lambda B (i.e. y' = B^T y)
  const std::size_t mdim = basis.size();
  std::vector<std::vector<Eigen::RowVector3d>> phi(mdim);
  auto rhs = [&](double s, const std::array<double, 3>& y) {
    Eigen::Vector3d yy(y[0], y[1], y[2]);
    Eigen::Vector3d d = m.B(s).transpose() * yy;
    return std::array<double, 3>{d(0), d(1), d(2)};
  };
  ode::StepControl ctrl = ode::StepControl::fixed_step(step / 4.0);
  for (std::size_t b = 0; b < mdim; ++b) {
    auto sol = ode::integrate<3>(rhs, {basis[b](0), basis[b](1), basis[b](2)}, s0, s1, ctrl);
    phi[b].resize(nsamples);
    for (std::size_t i = 0; i < nsamples; ++i) {
      auto y = sol.at(out.s[i]);
      phi[b][i] = Eigen::RowVector3d(y[0], y[1], y[2]);
    }
  }

  // stacked pointwise constraints on the combination coefficients
  Eigen::MatrixXd M(3 * nsamples, mdim);
  for (std::size_t i = 0; i < nsamples; ++i) {
    const Eigen::Matrix3d Ai = m.A(out.s[i]);
    for (std::size_t b = 0; b < mdim; ++b) {
      const Eigen::RowVector3d row = phi[b][i] * Ai;
      for (int c = 0; c < 3; ++c) M(3 * i + c, b) = row(c);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> msvd(M, Eigen::ComputeThinV);
  const auto& sv = msvd.singularValues();
  out.separation = sv(sv.size() - 1);
  Eigen::VectorXd coef = msvd.matrixV().col(sv.size() - 1);

  std::vector<Eigen::RowVector3d> cand(nsamples);
  double resid = 0, min_norm = std::numeric_limits<double>::infinity(), max_norm = 0;
  for (std::size_t i = 0; i < nsamples; ++i) {
    Eigen::RowVector3d lam = Eigen::RowVector3d::Zero();
    for (std::size_t b = 0; b < mdim; ++b) lam += coef(b) * phi[b][i];
    cand[i] = lam;
    resid = std::max(resid, (lam * m.A(out.s[i])).cwiseAbs().maxCoeff());
    min_norm = std::min(min_norm, lam.norm());
    max_norm = std::max(max_norm, lam.norm());
  }
  out.constraint_residual = resid;
  out.witness_min_norm = min_norm;
  if (resid <= kConstraintTol && min_norm >= kNonvanishingFloor) {
    out.singular = true;
    out.witness = std::move(cand);
    out.grid_solution_norm = max_norm;
  }
  return out;
}

}  // namespace reachgeo::regularity
