#include "lnt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lnt/gauss.hpp"

namespace lnt {
namespace {

constexpr double kFourPi = 4.0 * M_PI;
constexpr int kSeedCount = 4096;
constexpr int kMaxDegree = 32;

// Associated Legendre table with Condon-Shortley phase, 0 <= m <= l <= L,
// evaluated at x = cos(theta).
std::vector<std::vector<double>> legendre_table(int L, double x) {
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  std::vector<std::vector<double>> P(L + 1);
  for (int l = 0; l <= L; ++l) P[l].assign(l + 1, 0.0);
  P[0][0] = 1.0;
  for (int m = 1; m <= L; ++m) P[m][m] = -(2.0 * m - 1.0) * s * P[m - 1][m - 1];
  for (int m = 0; m < L; ++m) {
    P[m + 1][m] = x * (2.0 * m + 1.0) * P[m][m];
    for (int l = m + 2; l <= L; ++l) {
      P[l][m] = (x * (2.0 * l - 1.0) * P[l - 1][m] -
                 (l + m - 1.0) * P[l - 2][m]) /
                (l - m);
    }
  }
  return P;
}

double legendre_theta_derivative(const std::vector<std::vector<double>>& P,
                                 int l, int m) {
  if (m == 0) return l >= 1 ? P[l][1] : 0.0;
  const double upper = (m + 1 <= l) ? P[l][m + 1] : 0.0;
  return 0.5 * (upper - (l + m) * (l - m + 1.0) * P[l][m - 1]);
}

double sph_norm(int l, int m) {
  const double ratio = std::exp(std::lgamma(l - m + 1.0) -
                                std::lgamma(l + m + 1.0));
  return std::sqrt((2.0 * l + 1.0) / kFourPi * ratio);
}

struct AngleJet {
  double value = 0.0;
  double d_theta = 0.0;
  double d_phi = 0.0;
};

// Real spherical harmonic sum and angular partials at (theta, phi).
AngleJet harmonic_jet(const std::vector<Harmonic>& terms, int L, double theta,
                      double phi) {
  const auto P = legendre_table(L, std::cos(theta));
  AngleJet out;
  for (const auto& h : terms) {
    const int l = h.l, am = std::abs(h.m);
    const double N = sph_norm(l, am);
    const double p = P[l][am];
    const double dp = legendre_theta_derivative(P, l, am);
    double azim = 1.0, dazim = 0.0;
    double scale = N;
    if (h.m > 0) {
      scale *= std::sqrt(2.0);
      azim = std::cos(am * phi);
      dazim = -am * std::sin(am * phi);
    } else if (h.m < 0) {
      scale *= std::sqrt(2.0);
      azim = std::sin(am * phi);
      dazim = am * std::cos(am * phi);
    }
    out.value += h.coeff * scale * p * azim;
    out.d_theta += h.coeff * scale * dp * azim;
    out.d_phi += h.coeff * scale * p * dazim;
  }
  return out;
}

void to_angles(const Vec3& d, double& theta, double& phi) {
  const double r = d.norm();
  theta = std::acos(std::clamp(d.z / r, -1.0, 1.0));
  phi = std::atan2(d.y, d.x);
}

Vec3 unit_from_angles(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

}  // namespace

std::vector<Vec3> fibonacci_directions(int n) {
  if (n < 1) throw std::invalid_argument("fibonacci_directions: n must be positive");
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return dirs;
}

Domain Domain::ball(const Point3& center, double radius) {
  if (!center.finite() || !std::isfinite(radius) || radius <= 0.0)
    throw std::invalid_argument("ball domain needs a finite center and positive radius");
  Domain d;
  d.is_ball_ = true;
  d.center_ = center;
  d.radius_ = radius;
  d.min_rho_ = d.max_rho_ = radius;
  d.diameter_ = 2.0 * radius;
  d.volume_ = kFourPi / 3.0 * radius * radius * radius;
  return d;
}

Domain Domain::star(const Point3& center, std::vector<Harmonic> harmonics) {
  if (!center.finite())
    throw std::invalid_argument("star domain needs a finite center");
  if (harmonics.empty())
    throw std::invalid_argument("star domain needs at least one harmonic");
  int L = 0;
  for (const auto& h : harmonics) {
    if (h.l < 0 || h.l > kMaxDegree || std::abs(h.m) > h.l)
      throw std::invalid_argument("star harmonic indices out of range");
    if (!std::isfinite(h.coeff))
      throw std::invalid_argument("star harmonic coefficient must be finite");
    L = std::max(L, h.l);
  }
  Domain d;
  d.is_ball_ = false;
  d.center_ = center;
  d.harmonics_ = std::move(harmonics);
  d.max_degree_ = L;

  d.seed_dirs_ = fibonacci_directions(kSeedCount);
  d.seed_rho_.resize(kSeedCount);
  d.seed_angles_.resize(kSeedCount);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < kSeedCount; ++i) {
    double th, ph;
    to_angles(d.seed_dirs_[i], th, ph);
    d.seed_angles_[i] = {th, ph};
    const double r = d.rho(th, ph);
    d.seed_rho_[i] = r;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (!(lo > 0.0))
    throw std::invalid_argument("star support function must stay positive");
  d.min_rho_ = lo;
  d.max_rho_ = hi;

  double diam = 0.0;
  for (int i = 0; i < kSeedCount; ++i) {
    const auto [th, ph] = d.seed_angles_[i];
    diam = std::max(diam, d.seed_rho_[i] + d.rho(M_PI - th, ph + M_PI));
  }
  d.diameter_ = diam;

  // |Omega| = (1/3) integral of rho^3 over the sphere.
  const int nu = 48, nphi = 96;
  auto [us, wus] = gauss_legendre(nu, -1.0, 1.0);
  double vol = 0.0;
  for (int q = 0; q < nu; ++q) {
    const double th = std::acos(us[q]);
    for (int j = 0; j < nphi; ++j) {
      const double ph = (j + 0.5) * (2.0 * M_PI / nphi);
      const double r = d.rho(th, ph);
      vol += wus[q] * (2.0 * M_PI / nphi) * r * r * r / 3.0;
    }
  }
  d.volume_ = vol;
  return d;
}

bool Domain::is_ball() const { return is_ball_; }
const Point3& Domain::center() const { return center_; }

double Domain::ball_radius() const {
  if (!is_ball_) throw std::domain_error("ball_radius queried on a star domain");
  return radius_;
}

double Domain::rho(double theta, double phi) const {
  return harmonic_jet(harmonics_, max_degree_, theta, phi).value;
}

void Domain::rho_jet(double theta, double phi, double& r, double& r_theta,
                     double& r_phi) const {
  const AngleJet jet = harmonic_jet(harmonics_, max_degree_, theta, phi);
  r = jet.value;
  r_theta = jet.d_theta;
  r_phi = jet.d_phi;
}

Point3 Domain::surface_point(double theta, double phi) const {
  return center_ + rho(theta, phi) * unit_from_angles(theta, phi);
}

bool Domain::contains(const Point3& x) const {
  if (!x.finite()) throw std::invalid_argument("contains: point must be finite");
  const Vec3 d = x - center_;
  const double r = d.norm();
  if (is_ball_) return r < radius_;
  if (r == 0.0) return true;
  double th, ph;
  to_angles(d, th, ph);
  return r < rho(th, ph);
}

double Domain::dist_to_boundary(const Point3& x) const {
  if (!contains(x))
    throw std::domain_error("dist_to_boundary: point is not inside the domain");
  if (is_ball_) return radius_ - (x - center_).norm();

  // Seed from the dense table, then descend |x - S(theta, phi)|^2.
  int best = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSeedCount; ++i) {
    const Point3 s = center_ + seed_rho_[i] * seed_dirs_[i];
    const double f = (x - s).norm2();
    if (f < best_f) {
      best_f = f;
      best = i;
    }
  }
  double th = seed_angles_[best].first, ph = seed_angles_[best].second;

  auto value_grad = [&](double t, double p, double& gt, double& gp) {
    double r, rt, rp;
    rho_jet(t, p, r, rt, rp);
    const Vec3 er = unit_from_angles(t, p);
    const double st = std::sin(t), ct = std::cos(t);
    const Vec3 et{ct * std::cos(p), ct * std::sin(p), -st};
    const Vec3 ep{-std::sin(p), std::cos(p), 0.0};
    const Vec3 diff = x - (center_ + r * er);
    const Vec3 s_t = rt * er + r * et;
    const Vec3 s_p = rp * er + (r * st) * ep;
    gt = -2.0 * diff.dot(s_t);
    gp = -2.0 * diff.dot(s_p);
    return diff.norm2();
  };

  double gt, gp;
  double f = value_grad(th, ph, gt, gp);
  // Damped Newton on the foot-point equations; the (theta, phi) metric is
  // anisotropic near the poles, so plain gradient steps stall.
  for (int it = 0; it < 60; ++it) {
    const double g2 = gt * gt + gp * gp;
    if (g2 < 1e-28) break;
    const double h = 1e-6;
    double gtp, gpp, gtm, gpm;
    value_grad(th + h, ph, gtp, gpp);
    value_grad(th - h, ph, gtm, gpm);
    const double htt = (gtp - gtm) / (2 * h), htp = (gpp - gpm) / (2 * h);
    value_grad(th, ph + h, gtp, gpp);
    value_grad(th, ph - h, gtm, gpm);
    const double hpt = (gtp - gtm) / (2 * h), hpp = (gpp - gpm) / (2 * h);
    const double a = htt, b = 0.5 * (htp + hpt), c = hpp;
    const double det = a * c - b * b;
    double st_dir, sp_dir;
    if (det > 0.0 && a > 0.0) {
      st_dir = -(c * gt - b * gp) / det;
      sp_dir = -(a * gp - b * gt) / det;
    } else {
      st_dir = -gt;
      sp_dir = -gp;
    }
    double alpha = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k) {
      const double tn = std::clamp(th + alpha * st_dir, 1e-9, M_PI - 1e-9);
      const double pn = ph + alpha * sp_dir;
      double gtn, gpn;
      const double fn = value_grad(tn, pn, gtn, gpn);
      if (fn < f) {
        th = tn;
        ph = pn;
        f = fn;
        gt = gtn;
        gp = gpn;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return std::sqrt(std::min(f, best_f));
}

double Domain::diameter() const { return diameter_; }
double Domain::volume() const { return volume_; }
double Domain::bounding_radius() const { return max_rho_; }

double Domain::ray_exit(const Point3& from, const Vec3& dir) const {
  if (!contains(from))
    throw std::domain_error("ray_exit: ray origin is not inside the domain");
  const double dn = dir.norm();
  if (!(dn > 0.0) || !dir.finite())
    throw std::invalid_argument("ray_exit: direction must be finite and nonzero");
  const Vec3 u = dir / dn;
  const Vec3 p = from - center_;
  if (is_ball_) {
    const double b = p.dot(u);
    return -b + std::sqrt(std::max(0.0, b * b + radius_ * radius_ - p.norm2()));
  }

  auto level = [&](double t) {
    const Vec3 q = p + t * u;
    const double r = q.norm();
    if (r < 1e-14) return r - min_rho_;
    double th, ph;
    to_angles(q, th, ph);
    return r - rho(th, ph);
  };

  const double stride = 0.1 * min_rho_;
  const double tmax = 2.0 * diameter_ + stride;
  double t = stride;
  while (level(t) < 0.0) {
    t += stride;
    if (t > tmax)
      throw std::runtime_error("ray_exit: no boundary crossing found");
  }
  double lo = std::max(0.0, t - stride), hi = t;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (level(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

BoundarySample Domain::boundary_sample(int n) const {
  if (n < 12) throw std::invalid_argument("boundary_sample: need at least 12 points");
  const auto dirs = fibonacci_directions(n);
  BoundarySample out;
  out.points.reserve(n);
  out.normals.reserve(n);
  out.weights.reserve(n);
  if (is_ball_) {
    const double w = kFourPi * radius_ * radius_ / n;
    for (const auto& d : dirs) {
      out.points.push_back(center_ + radius_ * d);
      out.normals.push_back(d);
      out.weights.push_back(w);
    }
    return out;
  }
  for (const auto& d : dirs) {
    double th, ph;
    to_angles(d, th, ph);
    double r, rt, rp;
    rho_jet(th, ph, r, rt, rp);
    const double st = std::sin(th), ct = std::cos(th);
    const Vec3 er = unit_from_angles(th, ph);
    const Vec3 et{ct * std::cos(ph), ct * std::sin(ph), -st};
    const Vec3 ep{-std::sin(ph), std::cos(ph), 0.0};
    const double rp_over_st = rp / st;
    const Vec3 normal = (r * er - rt * et - rp_over_st * ep).normalized();
    const double area = r * std::sqrt(r * r + rt * rt + rp_over_st * rp_over_st);
    out.points.push_back(center_ + r * er);
    out.normals.push_back(normal);
    out.weights.push_back(kFourPi / n * area);
  }
  return out;
}

VolumeQuadrature Domain::volume_quadrature(const Point3& peak, double scale,
                                           int level) const {
  if (!contains(peak))
    throw std::domain_error("volume_quadrature: peak must lie inside the domain");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("volume_quadrature: scale must be positive");
  if (level < 0) throw std::invalid_argument("volume_quadrature: level must be >= 0");

  const int n_theta = 8 + 8 * level;
  const int n_phi = 2 * n_theta;
  const int n_r = 8 + 4 * level;
  auto [us, wus] = gauss_legendre(n_theta, -1.0, 1.0);
  auto [xr, wr] = gauss_legendre(n_r);
  const double wphi = 2.0 * M_PI / n_phi;

  VolumeQuadrature out;
  out.nodes.reserve(static_cast<size_t>(n_theta) * n_phi * n_r * 6);
  out.weights.reserve(out.nodes.capacity());
  for (int q = 0; q < n_theta; ++q) {
    const double st = std::sqrt(std::max(0.0, 1.0 - us[q] * us[q]));
    for (int j = 0; j < n_phi; ++j) {
      const double ph = (j + 0.5) * wphi;
      const Vec3 w{st * std::cos(ph), st * std::sin(ph), us[q]};
      double R = ray_exit(peak, w) * (1.0 - 1e-10);
      // Radial panels geometrically graded away from the peak.
      double lo = 0.0, hi = std::min(scale / 8.0, R / 4.0);
      while (lo < R) {
        for (int i = 0; i < n_r; ++i) {
          const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
          const double r = mid + half * xr[i];
          out.nodes.push_back(peak + r * w);
          out.weights.push_back(half * wr[i] * r * r * wus[q] * wphi);
        }
        lo = hi;
        hi = std::min(2.0 * hi, R);
        if (hi <= lo) break;
      }
    }
  }
  return out;
}

}  // namespace lnt
