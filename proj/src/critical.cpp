#include "lnt/critical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lnt/bubble.hpp"

namespace lnt {

namespace {

std::pair<double, Point3> sup_at(const Domain& d, double lambda,
                                 const CriticalOptions& opts) {
  const RobinEvaluator ev(d, lambda, opts.robin);
  const SupResult s = ev.sup_g(opts.grid_res, opts.sup_margin);
  return {s.M, s.argmax};
}

}  // namespace

CriticalResult lambda_star(const Domain& d, double tol,
                           const CriticalOptions& opts) {
  if (!(tol >= 1e-6))
    throw std::invalid_argument("lambda_star: tol must be at least 1e-6");

  CriticalResult res;
  auto probe = [&](double lam) {
    auto [m, p] = sup_at(d, lam, opts);
    res.bracket.emplace_back(lam, m);
    return std::make_pair(m, p);
  };

  double lo = 1.0, hi = 1.0;
  auto [m0, p0] = probe(1.0);
  double m_lo = m0, m_hi = m0;
  if (m0 < 0.0) {
    // sup g still negative: the critical value lies above.
    for (hi = 2.0;; hi *= 2.0) {
      if (hi > 1e3)
        throw std::runtime_error("lambda_star: no sign change in [1e-3, 1e3]");
      auto [m, p] = probe(hi);
      if (m > 0.0) {
        m_hi = m;
        break;
      }
      lo = hi;
      m_lo = m;
    }
  } else if (m0 > 0.0) {
    for (lo = 0.5;; lo *= 0.5) {
      if (lo < 1e-3)
        throw std::runtime_error("lambda_star: no sign change in [1e-3, 1e3]");
      auto [m, p] = probe(lo);
      if (m < 0.0) {
        m_lo = m;
        break;
      }
      hi = lo;
      m_hi = m;
    }
  } else {
    res.lambda_star = 1.0;
    res.argmax = p0;
    return res;
  }

  Point3 arg = p0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto [m, p] = probe(mid);
    arg = p;
    if (m < 0.0) {
      lo = mid;
      m_lo = m;
    } else {
      hi = mid;
      m_hi = m;
    }
  }

  res.lambda_star = 0.5 * (lo + hi);
  res.tol_achieved = hi - lo;
  auto [m, p] = probe(res.lambda_star);
  res.m_at_star = m;
  res.argmax = p;
  return res;
}

BubblePrediction bubble_prediction(const Domain& d, double lambda,
                                   const CriticalResult& crit,
                                   const CriticalOptions& opts) {
  if (!(lambda > crit.lambda_star))
    throw std::invalid_argument(
        "bubble_prediction: lambda must exceed the critical value "
        "(no bubbling regime below it)");
  auto [m, p] = sup_at(d, lambda, opts);
  BubblePrediction pr;
  pr.lambda = lambda;
  pr.x = p;
  pr.g_value = m;
  pr.mu = 4.0 * m / lambda;
  pr.Lambda = 1.0;
  pr.lambda_star = crit.lambda_star;
  pr.ratio = m / (lambda - crit.lambda_star);
  if (!(pr.mu > 0.0))
    throw std::runtime_error(
        "bubble_prediction: predicted scale is not positive above critical");
  return pr;
}

BubblePrediction bubble_prediction(const Domain& d, double lambda, double tol,
                                   const CriticalOptions& opts) {
  return bubble_prediction(d, lambda, lambda_star(d, tol, opts), opts);
}

std::vector<ReducedProfilePoint> reduced_energy_profile(
    const Domain& d, double lambda, const Point3& zeta,
    const std::vector<double>& Lambda_grid, const CriticalOptions& opts) {
  if (Lambda_grid.empty())
    throw std::invalid_argument("reduced_energy_profile: empty Lambda grid");
  for (double L : Lambda_grid)
    if (!(L > 0.05) || !(L < 20.0))
      throw std::invalid_argument(
          "reduced_energy_profile: Lambda grid outside (0.05, 20)");

  const RobinEvaluator ev(d, lambda, opts.robin);
  const double g = ev.g(zeta);
  if (!(g > 0.0))
    throw std::invalid_argument(
        "reduced_energy_profile: g(zeta) must be positive; lambda is below "
        "critical or zeta is away from the concentration set");

  const EnergyConstants a = energy_constants();
  const double curvature = a.a1 * a.a1 / (4.0 * a.a2) * g * g / lambda;
  std::vector<ReducedProfilePoint> out;
  out.reserve(Lambda_grid.size());
  for (double L : Lambda_grid) {
    ReducedProfilePoint pt;
    pt.Lambda = L;
    pt.mu = 0.5 * (a.a1 / a.a2) * (g / lambda) * L;
    const BubbleAnsatz U(ev.solver_ptr(), d, lambda, zeta, pt.mu,
                         opts.robin.margin_factor);
    pt.energy = energy(U, d.volume_quadrature(zeta, pt.mu, opts.quad_level));
    pt.model = a.a0 + curvature * (2.0 * L - L * L);
    out.push_back(pt);
  }
  return out;
}

HypothesesReport verify_hypotheses(const Domain& d, double lambda0,
                                   const Point3& x0,
                                   const CriticalOptions& opts) {
  const RobinEvaluator ev(d, lambda0, opts.robin);
  const double diam = d.diameter();
  const double h = 1e-3 * diam;
  if (!d.contains(x0) || d.dist_to_boundary(x0) < ev.margin() + 2.0 * h)
    throw std::domain_error("verify_hypotheses: x0 must be interior");

  HypothesesReport rep;
  rep.lambda = lambda0;
  rep.x0 = x0;
  rep.g0 = ev.g(x0);
  rep.grad = ev.grad_g(x0);

  const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 3; ++i)
    rep.hessian[i][i] =
        (ev.g(x0 + h * axes[i]) - 2.0 * rep.g0 + ev.g(x0 - h * axes[i])) /
        (h * h);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double v = (ev.g(x0 + h * axes[i] + h * axes[j]) -
                        ev.g(x0 + h * axes[i] - h * axes[j]) -
                        ev.g(x0 - h * axes[i] + h * axes[j]) +
                        ev.g(x0 - h * axes[i] - h * axes[j])) /
                       (4.0 * h * h);
      rep.hessian[i][j] = rep.hessian[j][i] = v;
    }

  Eigen::Matrix3d H;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) H(i, j) = rep.hessian[i][j];
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
  double min_abs = 1e300;
  for (int i = 0; i < 3; ++i) {
    rep.eigenvalues[i] = es.eigenvalues()[i];
    min_abs = std::min(min_abs, std::abs(es.eigenvalues()[i]));
  }
  rep.min_abs_eigenvalue = min_abs;

  // Probe grid: feasible points of the bounding box at the sup_g margin.
  const double m =
      opts.sup_margin > 0.0 ? opts.sup_margin : 2.0 * ev.margin();
  const int res = std::max(opts.grid_res, 3);
  const Point3 c = d.center();
  const double rad = d.bounding_radius();
  std::vector<Point3> pts;
  std::vector<double> gv;
  double max_g = -1e300;
  for (int ix = 0; ix < res; ++ix)
    for (int iy = 0; iy < res; ++iy)
      for (int iz = 0; iz < res; ++iz) {
        const Point3 p{c.x + rad * (2.0 * ix / (res - 1) - 1.0),
                       c.y + rad * (2.0 * iy / (res - 1) - 1.0),
                       c.z + rad * (2.0 * iz / (res - 1) - 1.0)};
        if (!d.contains(p) || d.dist_to_boundary(p) < m) continue;
        pts.push_back(p);
        gv.push_back(ev.g(p));
        rep.g_scale = std::max(rep.g_scale, std::abs(gv.back()));
        max_g = std::max(max_g, gv.back());
      }
  if (pts.empty())
    throw std::runtime_error("verify_hypotheses: no feasible grid points");

  rep.nondegeneracy_threshold = 1e-3 * rep.g_scale / (diam * diam);
  rep.hessian_nonsingular = rep.min_abs_eigenvalue > rep.nondegeneracy_threshold;
  rep.gradient_critical = rep.grad.norm() <= 1e-3 * rep.g_scale / diam;

  if (opts.region_radius > 0.0) {
    // D = ball(x0, r): interior sampled on the grid plus x0, boundary on
    // a quasi-uniform sphere.
    const double r = opts.region_radius;
    rep.sup_D = rep.g0;
    for (size_t k = 0; k < pts.size(); ++k)
      if ((pts[k] - x0).norm() < r) rep.sup_D = std::max(rep.sup_D, gv[k]);
    rep.sup_boundary_D = -1e300;
    for (const Vec3& dir : fibonacci_directions(200)) {
      const Point3 p = x0 + r * dir;
      if (!d.contains(p) || d.dist_to_boundary(p) < ev.margin()) continue;
      rep.sup_boundary_D = std::max(rep.sup_boundary_D, ev.g(p));
    }
  } else {
    // D = super-level set {g > sup g / 2} on the grid; its boundary is the
    // adjacent grid layer just below the threshold.
    const double thr = max_g - 0.5 * std::abs(max_g);
    const double step = 2.0 * rad / (res - 1);
    rep.sup_D = -1e300;
    rep.sup_boundary_D = -1e300;
    for (size_t k = 0; k < pts.size(); ++k) {
      if (gv[k] > thr) {
        rep.sup_D = std::max(rep.sup_D, gv[k]);
        continue;
      }
      bool adjacent = false;
      for (size_t j = 0; j < pts.size() && !adjacent; ++j)
        adjacent = gv[j] > thr && (pts[j] - pts[k]).norm() < 1.5 * step;
      if (adjacent) rep.sup_boundary_D = std::max(rep.sup_boundary_D, gv[k]);
    }
  }
  rep.condition_a = rep.sup_D > rep.sup_boundary_D;
  return rep;
}

namespace {

nlohmann::json point_json(const Point3& p) {
  return nlohmann::json{p.x, p.y, p.z};
}

}  // namespace

std::string to_json(const CriticalResult& r) {
  nlohmann::json j;
  j["lambda_star"] = r.lambda_star;
  j["argmax"] = point_json(r.argmax);
  j["m_at_star"] = r.m_at_star;
  j["tol_achieved"] = r.tol_achieved;
  j["evaluations"] = r.bracket.size();
  return j.dump(2);
}

std::string to_json(const BubblePrediction& p) {
  nlohmann::json j;
  j["lambda"] = p.lambda;
  j["x"] = point_json(p.x);
  j["g_value"] = p.g_value;
  j["mu"] = p.mu;
  j["Lambda"] = p.Lambda;
  j["lambda_star"] = p.lambda_star;
  j["ratio"] = p.ratio;
  return j.dump(2);
}

std::string to_json(const HypothesesReport& r) {
  nlohmann::json j;
  j["lambda"] = r.lambda;
  j["x0"] = point_json(r.x0);
  j["g0"] = r.g0;
  j["grad"] = point_json(r.grad);
  j["hessian"] = {point_json({r.hessian[0][0], r.hessian[0][1], r.hessian[0][2]}),
                  point_json({r.hessian[1][0], r.hessian[1][1], r.hessian[1][2]}),
                  point_json({r.hessian[2][0], r.hessian[2][1], r.hessian[2][2]})};
  j["eigenvalues"] = {r.eigenvalues[0], r.eigenvalues[1], r.eigenvalues[2]};
  j["min_abs_eigenvalue"] = r.min_abs_eigenvalue;
  j["nondegeneracy_threshold"] = r.nondegeneracy_threshold;
  j["hessian_nonsingular"] = r.hessian_nonsingular;
  j["gradient_critical"] = r.gradient_critical;
  j["g_scale"] = r.g_scale;
  j["sup_D"] = r.sup_D;
  j["sup_boundary_D"] = r.sup_boundary_D;
  j["condition_a"] = r.condition_a;
  return j.dump(2);
}

std::string bracket_csv(const CriticalResult& r) {
  std::string out = "lambda,M\n";
  char buf[80];
  for (const auto& [lam, m] : r.bracket) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", lam, m);
    out += buf;
  }
  return out;
}

}  // namespace lnt
