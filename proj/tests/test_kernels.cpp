#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "lnt/kernels.hpp"

using namespace lnt;

namespace {
constexpr double kFourPi = 4.0 * M_PI;

Point3 on_sphere(std::mt19937& rng, double r) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v{n(rng), n(rng), n(rng)};
  return (r / v.norm()) * v;
}
}  // namespace

TEST_CASE("free-space kernel at reference separations") {
  const Point3 o{0, 0, 0};
  CHECK(laplace_gamma(o, {1, 0, 0}) == doctest::Approx(1.0 / kFourPi).epsilon(1e-14));
  CHECK(laplace_gamma(o, {0, 2, 0}) == doctest::Approx(1.0 / (8.0 * M_PI)).epsilon(1e-14));
  CHECK(laplace_gamma(o, {0, 0, 0.5}) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(laplace_gamma(o, o), std::domain_error);
  CHECK_THROWS_AS(yukawa_phi(1.0, o, o), std::domain_error);
}

TEST_CASE("screened kernel limits and symmetry") {
  const Point3 o{0, 0, 0};
  const Point3 e{1, 0, 0};
  CHECK(yukawa_phi(1e-12, o, e) ==
        doctest::Approx(laplace_gamma(o, e)).epsilon(1e-5));
  CHECK(yukawa_phi(1.0, o, e) ==
        doctest::Approx(std::exp(-1.0) / kFourPi).epsilon(1e-14));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Point3 x{u(rng), u(rng), u(rng)};
    const Point3 y{u(rng) + 2.0, u(rng), u(rng)};
    CHECK(yukawa_phi(2.5, x, y) == doctest::Approx(yukawa_phi(2.5, y, x)).epsilon(1e-15));
  }
}

TEST_CASE("screened kernel decreases in separation and in lambda") {
  const Point3 o{0, 0, 0};
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ur(0.05, 3.0);
  std::uniform_real_distribution<double> ul(0.01, 10.0);
  for (int i = 0; i < 50; ++i) {
    const double r = ur(rng), lam = ul(rng);
    CHECK(yukawa_phi(lam, o, on_sphere(rng, r)) >
          yukawa_phi(lam, o, on_sphere(rng, r * 1.07)));
    CHECK(yukawa_phi(lam, o, on_sphere(rng, r)) >
          yukawa_phi(lam * 1.3, o, on_sphere(rng, r)));
  }
}

TEST_CASE("kernel difference approaches its diagonal limit linearly") {
  for (double lam : {0.5, 1.0, 4.0}) {
    const double limit = diag_limit(lam);
    for (int k = 2; k <= 6; ++k) {
      const double r = std::pow(10.0, -k);
      CHECK(std::abs(gamma_minus_phi(lam, r) - limit) <= lam * r);
    }
  }
  CHECK(diag_limit(4.0) == doctest::Approx(2.0 / kFourPi).epsilon(1e-15));
  CHECK(diag_limit(1.0) == doctest::Approx(1.0 / kFourPi).epsilon(1e-15));
  CHECK(diag_limit(2.0) > diag_limit(1.0));
  CHECK(diag_limit(1.0) > diag_limit(0.5));
}

TEST_CASE("kernel difference is stable through the series switchover") {
  // The truncated-series branch engages below s = 1e-4; it must agree with
  // the direct expression evaluated at the same radius.
  const double lam = 2.0;
  const double r_switch = 1e-4 / std::sqrt(lam);
  for (double f : {0.999, 0.5, 0.1}) {
    const double r = r_switch * f;
    const double direct = -std::expm1(-std::sqrt(lam) * r) / (4.0 * M_PI * r);
    CHECK(gamma_minus_phi(lam, r) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("bubble profile values and scaling") {
  const BubbleParams unit{{0, 0, 0}, 1.0};
  CHECK(bubble_w(unit, {0, 0, 0}) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-15));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double mu : {0.05, 0.3, 1.7}) {
    const BubbleParams scaled{{0, 0, 0}, mu};
    for (int i = 0; i < 10; ++i) {
      const Point3 z{u(rng), u(rng), u(rng)};
      CHECK(bubble_w(scaled, mu * z) ==
            doctest::Approx(bubble_w(unit, z) / std::sqrt(mu)).epsilon(1e-13));
    }
  }
}

TEST_CASE("bubble derivative companions match finite differences") {
  const BubbleParams p{{0.2, -0.1, 0.4}, 1.0};
  const Point3 x{1.1, 0.3, -0.2};

  const double h = 1e-6;
  BubbleParams up = p, dn = p;
  up.scale += h;
  dn.scale -= h;
  const double fd_scale = (bubble_w(up, x) - bubble_w(dn, x)) / (2 * h);
  CHECK(bubble_w_dscale(p, x) == doctest::Approx(fd_scale).epsilon(1e-7));

  const Vec3 g = bubble_w_grad(p, x);
  const Vec3 gc = bubble_w_dcenter(p, x);
  for (int axis = 0; axis < 3; ++axis) {
    Point3 xp = x, xm = x;
    xp[axis] += h;
    xm[axis] -= h;
    const double fd = (bubble_w(p, xp) - bubble_w(p, xm)) / (2 * h);
    CHECK(g[axis] == doctest::Approx(fd).epsilon(1e-7));
    BubbleParams cp = p, cm = p;
    cp.center[axis] += h;
    cm.center[axis] -= h;
    const double fdc = (bubble_w(cp, x) - bubble_w(cm, x)) / (2 * h);
    CHECK(gc[axis] == doctest::Approx(fdc).epsilon(1e-7));
  }
}

TEST_CASE("bubble profile satisfies its field equation") {
  // -laplacian(w) = w^5, checked with a second-order stencil.
  const BubbleParams p{{0, 0, 0}, 0.8};
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double h = 1e-3;
  for (int i = 0; i < 20; ++i) {
    const Point3 x{u(rng), u(rng), u(rng)};
    double lap = -6.0 * bubble_w(p, x);
    for (int axis = 0; axis < 3; ++axis) {
      Point3 xp = x, xm = x;
      xp[axis] += h;
      xm[axis] -= h;
      lap += bubble_w(p, xp) + bubble_w(p, xm);
    }
    lap /= h * h;
    const double w = bubble_w(p, x);
    CHECK(-lap == doctest::Approx(w * w * w * w * w).epsilon(1e-5));
  }
}

TEST_CASE("normal derivative companion matches a finite difference") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-6;
  for (int i = 0; i < 20; ++i) {
    const Point3 x{u(rng), u(rng), u(rng)};
    const Point3 y{u(rng) + 3.0, u(rng), u(rng)};
    Vec3 nu{u(rng), u(rng), u(rng)};
    nu = nu.normalized();
    const double fd =
        (yukawa_phi(1.7, x, y + h * nu) - yukawa_phi(1.7, x, y - h * nu)) / (2 * h);
    CHECK(yukawa_phi_dnu(1.7, x, y, nu) == doctest::Approx(fd).epsilon(1e-8));
    const Vec3 g = yukawa_phi_grad(1.7, x, y);
    CHECK(g.dot(nu) == doctest::Approx(fd).epsilon(1e-8));
  }
}
