#include "lnt/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace lnt {

namespace {
constexpr double kFourPi = 4.0 * M_PI;

double separation(const Point3& x, const Point3& y) {
    const double r = (x - y).norm();
    if (r == 0.0)
        throw std::domain_error("kernel evaluated at coincident points");
    return r;
}
}  // namespace

double laplace_gamma(const Point3& x, const Point3& y) {
    return 1.0 / (kFourPi * separation(x, y));
}

double yukawa_phi(double lambda, const Point3& x, const Point3& y) {
    const double r = separation(x, y);
    return std::exp(-std::sqrt(lambda) * r) / (kFourPi * r);
}

Vec3 yukawa_phi_grad(double lambda, const Point3& x, const Point3& y) {
    const Vec3 d = y - x;
    const double r = d.norm();
    if (r == 0.0)
        throw std::domain_error("kernel evaluated at coincident points");
    const double k = std::sqrt(lambda);
    // d/dr of e^{-kr}/(4 pi r)
    const double dphi = -std::exp(-k * r) * (1.0 + k * r) / (kFourPi * r * r);
    return d * (dphi / r);
}

double yukawa_phi_dnu(double lambda, const Point3& x, const Point3& y,
                      const Vec3& nu) {
    return yukawa_phi_grad(lambda, x, y).dot(nu);
}

double diag_limit(double lambda) { return std::sqrt(lambda) / kFourPi; }

double gamma_minus_phi(double lambda, double r) {
    if (r < 0.0) throw std::domain_error("negative separation");
    const double k = std::sqrt(lambda);
    const double s = k * r;
    if (s < 1e-4) {
        // (1 - e^{-s})/(4 pi r) = k/(4 pi) (1 - s/2 + s^2/6 - s^3/24 + ...)
        return diag_limit(lambda) *
               (1.0 - s / 2.0 + s * s / 6.0 - s * s * s / 24.0);
    }
    return -std::expm1(-s) / (kFourPi * r);
}

double bubble_w(const BubbleParams& p, const Point3& x) {
    const double rho2 = (x - p.center).norm2();
    const double mu = p.scale;
    return std::pow(3.0, 0.25) * std::sqrt(mu) / std::sqrt(mu * mu + rho2);
}

Vec3 bubble_w_grad(const BubbleParams& p, const Point3& x) {
    const Vec3 d = x - p.center;
    const double mu = p.scale;
    const double s = mu * mu + d.norm2();
    return d * (-std::pow(3.0, 0.25) * std::sqrt(mu) / (s * std::sqrt(s)));
}

Vec3 bubble_w_dcenter(const BubbleParams& p, const Point3& x) {
    return -bubble_w_grad(p, x);
}

double bubble_w_dscale(const BubbleParams& p, const Point3& x) {
    const double rho2 = (x - p.center).norm2();
    const double mu = p.scale;
    const double s = mu * mu + rho2;
    return std::pow(3.0, 0.25) * (rho2 - mu * mu) /
           (2.0 * std::sqrt(mu) * s * std::sqrt(s));
}

}  // namespace lnt
