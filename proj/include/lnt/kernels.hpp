#pragma once

#include "lnt/geometry.hpp"

namespace lnt {

// Fundamental solution of -Delta in 3D, 1/(4 pi |x-y|).
double laplace_gamma(const Point3& x, const Point3& y);

// Fundamental solution of -Delta + lambda in 3D, e^{-sqrt(lambda) r}/(4 pi r).
double yukawa_phi(double lambda, const Point3& x, const Point3& y);

// Directional derivative of y -> yukawa_phi(lambda, x, y) along the unit
// vector nu at y.
double yukawa_phi_dnu(double lambda, const Point3& x, const Point3& y,
                      const Vec3& nu);

// Gradient of y -> yukawa_phi(lambda, x, y).
Vec3 yukawa_phi_grad(double lambda, const Point3& x, const Point3& y);

// (laplace_gamma - yukawa_phi) as a function of r = |x-y|; continuous at
// r = 0 with value diag_limit(lambda).
double gamma_minus_phi(double lambda, double r);

// lim_{r->0} (1 - e^{-sqrt(lambda) r})/(4 pi r) = sqrt(lambda)/(4 pi).
double diag_limit(double lambda);

struct BubbleParams {
    Point3 center;   // zeta
    double scale;    // mu > 0
};

// Standard bubble 3^{1/4} mu^{1/2} / sqrt(mu^2 + |x-zeta|^2), solving
// -Delta w = w^5 on R^3.
double bubble_w(const BubbleParams& p, const Point3& x);

// Gradient in x.
Vec3 bubble_w_grad(const BubbleParams& p, const Point3& x);

// Derivative with respect to the center components (zeta_1, zeta_2, zeta_3).
Vec3 bubble_w_dcenter(const BubbleParams& p, const Point3& x);

// Derivative with respect to the scale mu.
double bubble_w_dscale(const BubbleParams& p, const Point3& x);

}  // namespace lnt
