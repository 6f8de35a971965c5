#include "lnt/robin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lnt/kernels.hpp"

namespace lnt {
namespace {

constexpr double kFourPi = 4.0 * M_PI;

// q(lambda) = ((s-1)/(s+1)) e^{2s}, s = sqrt(lambda); the ball formulas
// below are organized around it.
double ball_q(double lambda) {
  const double s = std::sqrt(lambda);
  return (s - 1.0) / (s + 1.0) * std::exp(2.0 * s);
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be positive and finite");
}

}  // namespace

double g_ball_analytic(double lambda) {
  require_lambda(lambda);
  const double s = std::sqrt(lambda);
  return s / kFourPi * (1.0 - 2.0 / (1.0 + ball_q(lambda)));
}

double G_ball_analytic(double lambda, double r) {
  require_lambda(lambda);
  if (!(r > 0.0) || !(r < 1.0))
    throw std::domain_error("G_ball_analytic: r must lie in (0, 1)");
  const double s = std::sqrt(lambda);
  return (std::exp(-s * r) + 2.0 * std::sinh(s * r) / (1.0 + ball_q(lambda))) /
         (kFourPi * r);
}

double lambda_star_ball(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("lambda_star_ball: tol must be positive");
  double lo = 1.0, hi = 2.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (ball_q(mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double g_ball_radial(double lambda, double a) {
  require_lambda(lambda);
  if (!(a >= 0.0) || !(a < 1.0))
    throw std::domain_error("g_ball_radial: a must lie in [0, 1)");
  const double z = std::sqrt(lambda);
  if (a < 1e-12) return g_ball_analytic(lambda);
  const double za = z * a;

  const int Lcap = 1400;
  // Downward continued fraction for the ratios i_l / i_{l-1}.
  auto i_ratios = [Lcap](double x) {
    std::vector<double> R(Lcap + 1, 0.0);
    double r = x / (2.0 * (Lcap + 41.0) + 1.0);
    for (int l = Lcap + 40; l >= 1; --l) {
      r = 1.0 / ((2.0 * l + 1.0) / x + r);
      if (l <= Lcap) R[l] = r;
    }
    return R;
  };
  const std::vector<double> Ra = i_ratios(za);
  const std::vector<double> Rz = i_ratios(z);

  // tau_l = (2l+1) i_l(za)^2 k_l'(z) / i_l'(z), accumulated via ratios so
  // the over/underflow of the individual Bessel factors never appears.
  const double i0a = std::sinh(za) / za;
  const double i0p = std::cosh(z) / z - std::sinh(z) / (z * z);
  const double k0p = -std::exp(-z) * (1.0 + z) / (z * z);
  double tau = i0a * i0a * k0p / i0p;
  double sum = tau;

  double K = (z + 1.0) / z;                      // k_1 / k_0
  double s_prev = -(1.0 + z) / z;                // k_0' / k_0
  double m_prev = 1.0 / std::tanh(z) - 1.0 / z;  // i_0' / i_0
  for (int l = 1; l <= Lcap; ++l) {
    const double s_l = -1.0 / K - (l + 1.0) / z;
    const double m_l = 1.0 / Rz[l] - (l + 1.0) / z;
    const double ratio = (2.0 * l + 1.0) / (2.0 * l - 1.0) * Ra[l] * Ra[l] * K *
                         (s_l / s_prev) * (m_prev / (Rz[l] * m_l));
    tau *= ratio;
    sum += tau;
    if (std::abs(tau) < 1e-18 * (1.0 + std::abs(sum))) break;
    K = 1.0 / K + (2.0 * l + 1.0) / z;
    s_prev = s_l;
    m_prev = m_l;
  }
  return z / kFourPi * (1.0 + sum);
}

RobinEvaluator::RobinEvaluator(const Domain& d, double lambda,
                               const RobinOptions& opts)
    : domain_(d), lambda_(lambda), opts_(opts) {
  require_lambda(lambda);
  if (!(opts.margin_factor > 0.0) || !(opts.fd_factor > 0.0) ||
      !(opts.lambda_fd_factor > 0.0) || opts.sup_starts < 1)
    throw std::invalid_argument("robin: options must be positive");
  margin_ = opts.margin_factor * d.diameter();
  solver_ = std::make_shared<NeumannSolver>(d, lambda, opts.solver);
}

HelmholtzField RobinEvaluator::regular_field(const Point3& s) const {
  const std::array<double, 3> key{s.x, s.y, s.z};
  std::shared_future<HelmholtzField> fut;
  std::promise<HelmholtzField> prom;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lk(cache_mu_);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      fut = prom.get_future().share();
      cache_.emplace(key, fut);
      owner = true;
    } else {
      fut = it->second;
    }
  }
  if (owner) {
    try {
      const double lam = lambda_;
      prom.set_value(solver_->solve([&s, lam](const Point3& y, const Vec3& nu) {
        return -yukawa_phi_dnu(lam, s, y, nu);
      }));
    } catch (...) {
      prom.set_exception(std::current_exception());
    }
  }
  return fut.get();
}

GResult RobinEvaluator::g_full(const Point3& x) const {
  if (!domain_.contains(x))
    throw std::domain_error("g: point outside the domain");
  if (domain_.dist_to_boundary(x) < margin_)
    throw std::domain_error(
        "g: point is inside the boundary margin, where the value is governed "
        "by the boundary asymptotics g ~ -1/(8 pi dist) + O(1); evaluate "
        "farther inside");
  const HelmholtzField u = regular_field(x);
  return {diag_limit(lambda_) - u.eval(x), u.diagnostics().residual_inf};
}

double RobinEvaluator::g(const Point3& x) const { return g_full(x).value; }

Vec3 RobinEvaluator::grad_g(const Point3& x) const {
  const double h = opts_.fd_factor * domain_.diameter();
  if (domain_.dist_to_boundary(x) < margin_ + 2.0 * h)
    throw std::domain_error("grad_g: insufficient margin for the FD stencil");
  Vec3 out{0, 0, 0};
  for (int axis = 0; axis < 3; ++axis) {
    auto diff = [&](double step) {
      Point3 p = x, m = x;
      p[axis] += step;
      m[axis] -= step;
      return (g(p) - g(m)) / (2.0 * step);
    };
    out[axis] = (4.0 * diff(h) - diff(2.0 * h)) / 3.0;
  }
  return out;
}

const RobinEvaluator& RobinEvaluator::sibling(bool up) const {
  std::lock_guard<std::mutex> lk(sibling_mu_);
  auto& slot = up ? sibling_hi_ : sibling_lo_;
  if (!slot) {
    const double delta = opts_.lambda_fd_factor * lambda_;
    slot = std::make_shared<RobinEvaluator>(domain_,
                                            lambda_ + (up ? delta : -delta),
                                            opts_);
  }
  return *slot;
}

double RobinEvaluator::dg_dlambda(const Point3& x) const {
  const double delta = opts_.lambda_fd_factor * lambda_;
  const double d = (sibling(true).g(x) - sibling(false).g(x)) / (2.0 * delta);
  if (!(d > 0.0))
    throw std::runtime_error(
        "dg_dlambda: finite difference came out nonpositive, which "
        "contradicts monotonicity; the solver is under-resolved");
  return d;
}

double RobinEvaluator::cross_regular(const Point3& zeta, const Point3& x) const {
  if (!domain_.contains(zeta) || domain_.dist_to_boundary(zeta) < margin_)
    throw std::domain_error("cross_regular: source inside the boundary margin");
  if (!domain_.contains(x))
    throw std::domain_error("cross_regular: evaluation point outside the domain");
  const double r = (zeta - x).norm();
  return gamma_minus_phi(lambda_, r) - regular_field(zeta).eval(x);
}

double RobinEvaluator::green(const Point3& x, const Point3& y) const {
  if (!domain_.contains(y) || domain_.dist_to_boundary(y) < margin_)
    throw std::domain_error("green: source inside the boundary margin");
  if (!domain_.contains(x))
    throw std::domain_error("green: evaluation point outside the domain");
  return yukawa_phi(lambda_, x, y) + regular_field(y).eval(x);
}

SupResult RobinEvaluator::sup_g(int grid_res, double margin) const {
  if (grid_res < 2) throw std::invalid_argument("sup_g: grid resolution too small");
  const double h = opts_.fd_factor * domain_.diameter();
  const double m = margin <= 0.0 ? 2.0 * margin_ : margin;
  if (m <= margin_ + 2.0 * h)
    throw std::invalid_argument("sup_g: margin must exceed the evaluation margin");

  auto feasible = [&](const Point3& p) {
    return domain_.contains(p) && domain_.dist_to_boundary(p) >= m;
  };

  const Point3 c = domain_.center();
  const double r = domain_.bounding_radius();
  std::vector<std::pair<double, Point3>> probed;
  for (int i = 0; i < grid_res; ++i)
    for (int j = 0; j < grid_res; ++j)
      for (int k = 0; k < grid_res; ++k) {
        const Point3 p{c.x + r * (2.0 * i / (grid_res - 1.0) - 1.0),
                       c.y + r * (2.0 * j / (grid_res - 1.0) - 1.0),
                       c.z + r * (2.0 * k / (grid_res - 1.0) - 1.0)};
        if (feasible(p)) probed.emplace_back(g(p), p);
      }
  if (probed.empty())
    throw std::runtime_error("sup_g: the margin excludes every grid point");

  std::stable_sort(probed.begin(), probed.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const int starts = std::min<int>(opts_.sup_starts, probed.size());

  SupResult out;
  out.trace.reserve(starts);
  for (int s = 0; s < starts; ++s) {
    Point3 x = probed[s].second;
    double fx = probed[s].first;
    AscentTrace tr{x, x, fx, false};
    double step0 = 0.1 * domain_.diameter();
    for (int it = 0; it < 80; ++it) {
      const Vec3 gr = grad_g(x);
      const double gn = gr.norm();
      if (gn < 1e-12) break;
      double alpha = step0;
      bool moved = false;
      while (alpha > 1e-13 * domain_.diameter()) {
        const Point3 xn = x + (alpha / gn) * gr;
        if (feasible(xn)) {
          const double fn = g(xn);
          if (fn > fx + 1e-4 * alpha * gn) {
            x = xn;
            fx = fn;
            step0 = std::min(2.0 * alpha, 0.25 * domain_.diameter());
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    tr.converged = x;
    tr.value = fx;
    tr.hit_margin = domain_.dist_to_boundary(x) < 1.05 * m;
    out.trace.push_back(tr);
  }

  bool any_interior = false;
  for (const auto& tr : out.trace) any_interior |= !tr.hit_margin;
  if (!any_interior)
    throw std::runtime_error(
        "sup_g: every ascent start ran into the margin; enlarge the margin");

  out.M = out.trace.front().value;
  out.argmax = out.trace.front().converged;
  for (const auto& tr : out.trace)
    if (tr.value > out.M) {
      out.M = tr.value;
      out.argmax = tr.converged;
    }
  return out;
}

}  // namespace lnt
