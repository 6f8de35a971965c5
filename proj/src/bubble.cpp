#include "lnt/bubble.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lnt/gauss.hpp"
#include "lnt/kernels.hpp"
#include "lnt/robin.hpp"

namespace lnt {
namespace {

constexpr double kRoot3Quarter = 1.3160740129524924;  // 3^{1/4}

double kahan_sum(const std::vector<double>& terms) {
  double s = 0.0, c = 0.0;
  for (double t : terms) {
    const double y = t - c;
    const double u = s + y;
    c = (u - s) - y;
    s = u;
  }
  return s;
}

// Integral of f over (0, inf), split at 1 with the inversion s = 1/r on the
// tail; f must decay at least like 1/r^2 so the inverted integrand is
// bounded near s = 0.
double integral_radial(const std::function<double(double)>& f) {
  static const auto gl = gauss_legendre(64, 0.0, 1.0);
  double s = 0.0;
  for (size_t i = 0; i < gl.first.size(); ++i) {
    const double t = gl.first[i];
    s += gl.second[i] * (f(t) + f(1.0 / t) / (t * t));
  }
  return s;
}

double w_unit(double r) { return kRoot3Quarter / std::sqrt(1.0 + r * r); }

// Radial profile of the free-space potential: V solves -V'' - (2/r)V' +
// lambda V = w_mu with decay, via the variation-of-parameters form
//   V(r) = [exp(-kr) I1(r) + sinh(kr) I2(r)] / (kr),
//   I1 = int_0^r s w sinh(ks) ds,  I2 = int_r^inf s w exp(-ks) ds.
// Prefix/suffix panel sums keep every partial integral a sum of positive
// terms, so no cancellation enters even where sinh is exponentially large.
class RadialPotential {
 public:
  RadialPotential(double lambda, double mu, double r_need)
      : kappa_(std::sqrt(lambda)), mu_(mu), r_need_(r_need) {
    const double r_tail = r_need + 40.0 / kappa_;
    b_.push_back(0.0);
    for (double e = mu / 8.0;; e *= 2.0) {
      b_.push_back(e);
      if (e >= r_tail) break;
    }
    const size_t np = b_.size() - 1;
    std::vector<double> s1(np), s2(np);
    for (size_t k = 0; k < np; ++k) {
      double a1 = 0.0, a2 = 0.0;
      panel(b_[k], b_[k + 1], a1, a2);
      s1[k] = a1;
      s2[k] = a2;
    }
    p1_.assign(b_.size(), 0.0);
    for (size_t k = 0; k < np; ++k) {
      p1_[k + 1] = p1_[k] + s1[k];
      if (kappa_ * b_[k + 1] > 660.0) break;  // never consumed past r_need
    }
    suf2_.assign(b_.size(), 0.0);
    for (size_t k = np; k-- > 0;) suf2_[k] = suf2_[k + 1] + s2[k];
  }

  double value(double r) const {
    double v, dv;
    eval(r, v, &dv, false);
    return v;
  }

  void eval(double r, double& v, double* dv, bool want_dv = true) const {
    if (r <= 0.0) {
      v = suf2_[0];
      if (dv) *dv = 0.0;
      return;
    }
    if (r > r_need_ * 1.0000001)
      throw std::logic_error("radial potential evaluated past its range");
    const size_t k = panel_index(r);
    double a1 = 0.0, a2 = 0.0;
    panel(b_[k], r, a1, a2);
    const double i1 = p1_[k] + a1;
    a1 = 0.0;
    a2 = 0.0;
    panel(r, b_[k + 1], a1, a2);
    const double i2 = suf2_[k + 1] + a2;

    const double t = kappa_ * r;
    v = (std::exp(-t) * i1 + std::sinh(t) * i2) / t;
    if (dv && want_dv) {
      if (t < 1e-3) {
        const double w = mu_w(r);
        *dv = r * (kappa_ * kappa_ * v - w) / 3.0;
      } else {
        *dv = (std::cosh(t) * i2 - std::exp(-t) * i1 - v) / r;
      }
    }
  }

 private:
  double mu_w(double r) const {
    return kRoot3Quarter * std::sqrt(mu_) / std::sqrt(mu_ * mu_ + r * r);
  }

  size_t panel_index(double r) const {
    const auto it = std::upper_bound(b_.begin(), b_.end(), r);
    return std::min<size_t>(it - b_.begin(), b_.size() - 1) - 1;
  }

  // Adds int_a^b of s w sinh(ks) and s w exp(-ks).
  void panel(double a, double b, double& acc1, double& acc2) const {
    if (b <= a) return;
    static const auto gl = gauss_legendre(32);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (size_t i = 0; i < gl.first.size(); ++i) {
      const double s = mid + half * gl.first[i];
      const double base = half * gl.second[i] * s * mu_w(s);
      const double t = kappa_ * s;
      if (t < 660.0) acc1 += base * std::sinh(t);
      acc2 += base * std::exp(-t);
    }
  }

  double kappa_, mu_, r_need_;
  std::vector<double> b_, p1_, suf2_;
};

}  // namespace

EnergyConstants energy_constants() {
  const double s3 = std::sqrt(3.0), p2 = M_PI * M_PI;
  return {0.25 * s3 * p2, 8.0 * s3 * p2, s3 * p2, 120.0 * s3 * p2 * p2};
}

double bubble_w6_integral() {
  return integral_radial([](double r) {
    const double w = w_unit(r);
    const double w2 = w * w;
    return 4.0 * M_PI * r * r * w2 * w2 * w2;
  });
}

double bubble_w5_integral() {
  return integral_radial([](double r) {
    const double w = w_unit(r);
    const double w2 = w * w;
    return 4.0 * M_PI * r * r * w2 * w2 * w;
  });
}

double bubble_w4_integral() {
  return integral_radial([](double r) {
    const double w = w_unit(r);
    const double w2 = w * w;
    return 4.0 * M_PI * r * r * w2 * w2;
  });
}

EnergyConstants energy_constants_from_integrals() {
  const double gamma_part = integral_radial([](double r) {
    return 4.0 * M_PI * r * r * w_unit(r) *
           (1.0 / r - 1.0 / std::sqrt(1.0 + r * r));
  });
  const double moment_part = integral_radial([](double r) {
    const double w = w_unit(r);
    const double w2 = w * w;
    return 4.0 * M_PI * r * r * r * w2 * w2 * w;
  });
  EnergyConstants c;
  c.a0 = bubble_w6_integral() / 3.0;
  c.a1 = 2.0 * M_PI * kRoot3Quarter * bubble_w5_integral();
  c.a2 = 0.5 * kRoot3Quarter * (gamma_part + 0.5 * moment_part);
  c.a3 = 40.0 * M_PI * M_PI * std::sqrt(3.0) * bubble_w4_integral();
  return c;
}

struct BubbleAnsatz::Impl {
  double lambda;
  BubbleParams bp;
  RadialPotential V;
  HelmholtzField h;
  double peak = 0.0;

  Impl(const NeumannSolver& solver, const Domain& d, double lam,
       const Point3& zeta, double mu, double margin_factor)
      : lambda(lam),
        bp{zeta, mu},
        V(lam, mu, d.diameter() * 1.001),
        h(make_correction(solver, lam, zeta, mu, V)) {
    peak = bubble_w(bp, zeta) - lambda * V.value(0.0) + h.eval(zeta);
  }

  static HelmholtzField make_correction(const NeumannSolver& solver,
                                        double lam, const Point3& zeta,
                                        double mu, const RadialPotential& V) {
    const BubbleParams bp{zeta, mu};
    return solver.solve([&](const Point3& y, const Vec3& nu) {
      const Vec3 rel = y - zeta;
      const double r = rel.norm();
      double v, dv;
      V.eval(r, v, &dv);
      return -bubble_w_grad(bp, y).dot(nu) + lam * dv * rel.dot(nu) / r;
    });
  }

  double pi(const Point3& x) const {
    return -lambda * V.value((x - bp.center).norm()) + h.eval(x);
  }

  void both(const Point3& x, double& value, Vec3& grad) const {
    const Vec3 rel = x - bp.center;
    const double r = rel.norm();
    double v, dv;
    V.eval(r, v, &dv);
    double hv;
    Vec3 hg;
    h.eval_both(x, hv, hg);
    value = bubble_w(bp, x) - lambda * v + hv;
    grad = bubble_w_grad(bp, x) + hg;
    if (r > 0.0) grad += (-lambda * dv / r) * rel;
  }
};

BubbleAnsatz::BubbleAnsatz(const Domain& d, double lambda, const Point3& zeta,
                           double mu, const AnsatzOptions& opts)
    : BubbleAnsatz(std::make_shared<const NeumannSolver>(d, lambda,
                                                         opts.solver),
                   d, lambda, zeta, mu, opts.margin_factor) {}

BubbleAnsatz::BubbleAnsatz(std::shared_ptr<const NeumannSolver> solver,
                           const Domain& d, double lambda, const Point3& zeta,
                           double mu, double margin_factor) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("ansatz: lambda must be positive");
  const double diam = d.diameter();
  if (!(mu >= 1e-3 * diam) || !(mu <= 0.5 * diam))
    throw std::invalid_argument(
        "ansatz: mu outside [1e-3, 0.5] x diameter; the peak cannot be "
        "resolved (small) or dominates the domain (large)");
  if (!d.contains(zeta) || d.dist_to_boundary(zeta) < margin_factor * diam)
    throw std::domain_error("ansatz: center too close to the boundary");
  impl_ = std::make_unique<Impl>(*solver, d, lambda, zeta, mu, margin_factor);
}

BubbleAnsatz::~BubbleAnsatz() = default;
BubbleAnsatz::BubbleAnsatz(BubbleAnsatz&&) noexcept = default;
BubbleAnsatz& BubbleAnsatz::operator=(BubbleAnsatz&&) noexcept = default;

double BubbleAnsatz::u(const Point3& x) const {
  return bubble_w(impl_->bp, x) + impl_->pi(x);
}

Vec3 BubbleAnsatz::grad_u(const Point3& x) const {
  double v;
  Vec3 g;
  impl_->both(x, v, g);
  return g;
}

void BubbleAnsatz::eval_both(const Point3& x, double& value, Vec3& grad) const {
  impl_->both(x, value, grad);
}

double BubbleAnsatz::w(const Point3& x) const { return bubble_w(impl_->bp, x); }
double BubbleAnsatz::pi(const Point3& x) const { return impl_->pi(x); }
double BubbleAnsatz::lambda() const { return impl_->lambda; }
double BubbleAnsatz::mu() const { return impl_->bp.scale; }
const Point3& BubbleAnsatz::zeta() const { return impl_->bp.center; }
double BubbleAnsatz::peak() const { return impl_->peak; }
double BubbleAnsatz::flux_residual() const {
  return impl_->h.diagnostics().residual_inf;
}

double energy(double lambda, const std::function<double(const Point3&)>& u,
              const std::function<Vec3(const Point3&)>& grad_u,
              const VolumeQuadrature& q) {
  std::vector<double> terms(q.nodes.size());
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    const double uv = u(q.nodes[i]);
    const Vec3 gr = grad_u(q.nodes[i]);
    const double u2 = uv * uv;
    terms[i] = q.weights[i] * (0.5 * gr.norm2() + 0.5 * lambda * u2 -
                               u2 * u2 * u2 / 6.0);
  }
  return kahan_sum(terms);
}

double energy(const BubbleAnsatz& U, const VolumeQuadrature& q) {
  std::vector<double> terms(q.nodes.size());
  const double lambda = U.lambda();
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    double uv;
    Vec3 gr;
    U.eval_both(q.nodes[i], uv, gr);
    const double u2 = uv * uv;
    terms[i] = q.weights[i] * (0.5 * gr.norm2() + 0.5 * lambda * u2 -
                               u2 * u2 * u2 / 6.0);
  }
  return kahan_sum(terms);
}

namespace {

void require_mu_list(const std::vector<double>& mu, double diam) {
  if (mu.empty()) throw std::invalid_argument("mu list must be nonempty");
  for (size_t i = 0; i < mu.size(); ++i) {
    if (!(mu[i] >= 1e-3 * diam) || !(mu[i] <= 0.5 * diam))
      throw std::invalid_argument("mu list outside the ansatz range");
    if (i > 0 && !(mu[i] < mu[i - 1]))
      throw std::invalid_argument("mu list must be strictly decreasing");
  }
}

// Least-squares slope of log|y| against log x; NaN-free inputs assumed.
double log_log_slope(const std::vector<double>& x,
                     const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(std::abs(y[i]), 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool decreasing_magnitudes(const std::vector<double>& r) {
  for (size_t i = 1; i < r.size(); ++i)
    if (!(std::abs(r[i]) < std::abs(r[i - 1]))) return false;
  return true;
}

}  // namespace

std::string ExpansionReport::csv() const {
  std::string out = "mu,E_measured,E_model,remainder\n";
  char line[160];
  for (size_t i = 0; i < mu.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", mu[i],
                  e_measured[i], e_model[i], remainder[i]);
    out += line;
  }
  return out;
}

ExpansionReport expansion_check(const Domain& d, double lambda,
                                const Point3& zeta, std::vector<double> mu_list,
                                const AnsatzOptions& opts) {
  require_mu_list(mu_list, d.diameter());
  RobinOptions ro;
  ro.solver = opts.solver;
  ro.margin_factor = opts.margin_factor;
  const RobinEvaluator ev(d, lambda, ro);
  const double g = ev.g(zeta);
  const EnergyConstants a = energy_constants();

  ExpansionReport rep;
  rep.mu = std::move(mu_list);
  rep.g_value = g;
  for (double mu : rep.mu) {
    const BubbleAnsatz U(ev.solver_ptr(), d, lambda, zeta, mu,
                         opts.margin_factor);
    const double e = energy(U, d.volume_quadrature(zeta, mu, opts.quad_level));
    const double model =
        a.a0 + a.a1 * mu * g - a.a2 * lambda * mu * mu - a.a3 * mu * mu * g * g;
    rep.e_measured.push_back(e);
    rep.e_model.push_back(model);
    rep.remainder.push_back(e - model);
  }
  rep.monotone = decreasing_magnitudes(rep.remainder);
  if (rep.monotone) rep.slope = log_log_slope(rep.mu, rep.remainder);
  return rep;
}

double D0Solution::at(double radius) const {
  if (!(radius >= 0.0)) throw std::domain_error("D0 evaluated at negative r");
  if (radius >= r_max) {
    if (radius > 3.0 * r_max)
      throw std::domain_error("D0 evaluated far past the matched tail");
    return (c1 * std::log(radius) + c2) / radius;
  }
  const auto it = std::upper_bound(r.begin(), r.end(), radius);
  const size_t k = std::max<size_t>(it - r.begin(), 1) - 1;
  const double h = r[k + 1] - r[k];
  const double t = (radius - r[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * value[k] + (t3 - 2 * t2 + t) * h * deriv[k] +
         (-2 * t3 + 3 * t2) * value[k + 1] + (t3 - t2) * h * deriv[k + 1];
}

D0Solution d0_solve(double lambda, double r_max) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("d0_solve: lambda must be positive");
  if (!(r_max >= 100.0))
    throw std::invalid_argument("d0_solve: r_max must be at least 100");

  const double c = lambda * kRoot3Quarter;
  const auto source = [c](double r) {
    return c * (r - r * r / std::sqrt(1.0 + r * r));
  };
  // State y = (Dtilde, P) with Dtilde' = P / r^2, P' = source, started from
  // the series Dtilde = c (r/2 - r^2/6), P = c (r^2/2 - r^3/3) near 0, the
  // branch with no r^{-1} singular part (P -> 0).
  const auto deriv2 = [&](double r, const std::array<double, 2>& y) {
    return std::array<double, 2>{y[1] / (r * r), source(r)};
  };
  const auto rk4 = [&](double r, std::array<double, 2> y, double h) {
    const auto k1 = deriv2(r, y);
    const auto k2 = deriv2(
        r + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
    const auto k3 = deriv2(
        r + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
    const auto k4 = deriv2(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    y[0] += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    y[1] += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    return y;
  };

  D0Solution sol;
  sol.r_max = r_max;
  const double r0 = 1e-6;
  double r = r0;
  std::array<double, 2> y{c * (r0 / 2 - r0 * r0 / 6),
                          c * (r0 * r0 / 2 - r0 * r0 * r0 / 3)};
  sol.r.push_back(0.0);
  sol.value.push_back(0.0);
  sol.deriv.push_back(c / 2.0);
  sol.r.push_back(r);
  sol.value.push_back(y[0]);
  sol.deriv.push_back(y[1] / (r * r));

  const double tol = 1e-12;
  double h = r0;
  while (r < r_max) {
    h = std::min({h, 1.0, r_max - r});
    const auto full = rk4(r, y, h);
    auto half = rk4(r, y, h / 2);
    half = rk4(r + h / 2, half, h / 2);
    double err = 0.0;
    for (int i = 0; i < 2; ++i)
      err = std::max(err, std::abs(half[i] - full[i]) /
                              std::max(std::abs(half[i]), 1e-3));
    if (err <= tol) {
      for (int i = 0; i < 2; ++i) y[i] = half[i] + (half[i] - full[i]) / 15.0;
      r += h;
      sol.r.push_back(r);
      sol.value.push_back(y[0]);
      sol.deriv.push_back(y[1] / (r * r));
      h *= std::min(2.0, 0.9 * std::pow(tol / std::max(err, 1e-30), 0.2));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
    }
  }

  // Tail matching: Dtilde(r) ~ L + (c1 log r + c2)/r on [r_max/2, r_max];
  // subtracting L leaves the decaying solution.
  std::vector<size_t> win;
  for (size_t i = 0; i < sol.r.size(); ++i)
    if (sol.r[i] >= 0.5 * r_max) win.push_back(i);
  Eigen::MatrixXd X(win.size(), 3);
  Eigen::VectorXd b(win.size());
  for (size_t j = 0; j < win.size(); ++j) {
    const double rr = sol.r[win[j]];
    X(j, 0) = 1.0;
    X(j, 1) = std::log(rr) / rr;
    X(j, 2) = 1.0 / rr;
    b(j) = sol.value[win[j]];
  }
  const Eigen::Vector3d beta = X.colPivHouseholderQr().solve(b);
  sol.limit = beta(0);
  sol.c1 = beta(1);
  sol.c2 = beta(2);
  for (double& v : sol.value) v -= sol.limit;
  return sol;
}

PiExpansionReport pi_expansion_check(const Domain& d, double lambda,
                                     const Point3& zeta,
                                     std::vector<double> mu_list,
                                     std::vector<Point3> probes,
                                     const AnsatzOptions& opts) {
  require_mu_list(mu_list, d.diameter());
  if (probes.empty()) throw std::invalid_argument("probe list must be nonempty");
  for (const Point3& p : probes)
    if (!d.contains(p)) throw std::domain_error("probe outside the domain");

  RobinOptions ro;
  ro.solver = opts.solver;
  ro.margin_factor = opts.margin_factor;
  const RobinEvaluator ev(d, lambda, ro);
  const D0Solution d0 = d0_solve(lambda);
  const double coef = 4.0 * M_PI * kRoot3Quarter;

  PiExpansionReport rep;
  rep.mu = std::move(mu_list);
  rep.probes = std::move(probes);
  std::vector<double> H(rep.probes.size());
  for (size_t p = 0; p < rep.probes.size(); ++p)
    H[p] = ev.cross_regular(zeta, rep.probes[p]);

  rep.residual.assign(rep.probes.size(), {});
  rep.residual_ablated.assign(rep.probes.size(), {});
  for (double mu : rep.mu) {
    const BubbleAnsatz U(ev.solver_ptr(), d, lambda, zeta, mu,
                         opts.margin_factor);
    for (size_t p = 0; p < rep.probes.size(); ++p) {
      const double scaled = U.pi(rep.probes[p]) / std::sqrt(mu);
      const double lead = scaled + coef * H[p];
      rep.residual_ablated[p].push_back(lead);
      rep.residual[p].push_back(
          lead + mu * d0.at((rep.probes[p] - zeta).norm() / mu));
    }
  }

  rep.monotone = true;
  for (size_t p = 0; p < rep.probes.size(); ++p) {
    const bool mono = decreasing_magnitudes(rep.residual[p]);
    rep.monotone = rep.monotone && mono;
    rep.slope.push_back(mono ? log_log_slope(rep.mu, rep.residual[p])
                             : std::numeric_limits<double>::quiet_NaN());
    rep.slope_ablated.push_back(
        log_log_slope(rep.mu, rep.residual_ablated[p]));
  }
  return rep;
}

}  // namespace lnt
