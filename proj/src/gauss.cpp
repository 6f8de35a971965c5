#include "lnt/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace lnt {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  return {x, w};
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n,
                                                                   double a,
                                                                   double b) {
  auto [x, w] = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    x[i] = mid + half * x[i];
    w[i] *= half;
  }
  return {x, w};
}

}  // namespace lnt
