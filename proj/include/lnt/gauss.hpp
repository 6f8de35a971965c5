#pragma once

#include <utility>
#include <vector>

namespace lnt {

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// The same rule mapped to [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n,
                                                                   double a,
                                                                   double b);

}  // namespace lnt
