#pragma once

// Gauss-Legendre nodes/weights, mapped to [0, 1]. Nodes come from Newton
// iteration on the Legendre polynomial; accuracy is machine precision for
// the orders used here.

#include <cmath>
#include <cstddef>
#include <vector>

namespace reachgeo::quad {

struct Rule {
  std::vector<double> nodes;    // in [0, 1]
  std::vector<double> weights;  // sum to 1
};

inline Rule gauss_legendre(std::size_t n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // initial guess (Chebyshev-like), then Newton on P_n
    double x = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      pp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

template <class F>
double integrate(const Rule& r, F&& f, double lo = 0.0, double hi = 1.0) {
  double acc = 0;
  const double w = hi - lo;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    acc += r.weights[i] * f(lo + w * r.nodes[i]);
  return acc * w;
}

}  // namespace reachgeo::quad
