#pragma once

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "lnt/domain.hpp"
#include "lnt/field_solver.hpp"
#include "lnt/geometry.hpp"

namespace lnt {

struct RobinOptions {
  SolverOptions solver;
  double margin_factor = 0.02;     // interior margin, fraction of diameter
  double fd_factor = 1e-4;         // spatial FD step, fraction of diameter
  double lambda_fd_factor = 1e-4;  // lambda FD step, fraction of lambda
  int sup_starts = 8;              // multistart count for sup_g
};

struct GResult {
  double value = 0.0;
  double residual = 0.0;  // boundary residual of the underlying solve
};

struct AscentTrace {
  Point3 start;
  Point3 converged;
  double value = 0.0;
  bool hit_margin = false;
};

struct SupResult {
  double M = 0.0;
  Point3 argmax;
  std::vector<AscentTrace> trace;
};

// Robin function g_lambda(x): the diagonal of the regular part of the
// Neumann Green function of -Delta + lambda, computed from the diagonal
// limit of (Gamma - Phi_lambda) plus one homogeneous solve per source
// point. Evaluations are cached per source point and are thread-safe.
class RobinEvaluator {
 public:
  RobinEvaluator(const Domain& d, double lambda, const RobinOptions& opts = {});

  const Domain& domain() const { return domain_; }
  double lambda() const { return lambda_; }
  // Absolute interior margin below which g is not evaluated.
  double margin() const { return margin_; }
  const NeumannSolver& solver() const { return *solver_; }
  std::shared_ptr<const NeumannSolver> solver_ptr() const { return solver_; }

  double g(const Point3& x) const;
  GResult g_full(const Point3& x) const;
  Vec3 grad_g(const Point3& x) const;
  // Central FD in lambda; positive by monotonicity, throws otherwise.
  double dg_dlambda(const Point3& x) const;

  // Cross regular part H_lambda(zeta, x) = (Gamma - Phi)(zeta, x) - u_zeta(x).
  double cross_regular(const Point3& zeta, const Point3& x) const;
  // Assembled Green function G_lambda(x, y) = Phi_lambda(x, y) + u_y(x).
  double green(const Point3& x, const Point3& y) const;
  // The cached homogeneous correction u_source.
  HelmholtzField regular_field(const Point3& source) const;

  // Multistart ascent from the best grid values; margin <= 0 selects
  // twice the evaluation margin. The supplied margin must exceed the
  // evaluation margin.
  SupResult sup_g(int grid_res = 9, double margin = 0.0) const;

 private:
  const RobinEvaluator& sibling(bool up) const;

  Domain domain_;
  double lambda_;
  RobinOptions opts_;
  double margin_;
  std::shared_ptr<NeumannSolver> solver_;

  mutable std::mutex cache_mu_;
  mutable std::map<std::array<double, 3>, std::shared_future<HelmholtzField>> cache_;
  mutable std::mutex sibling_mu_;
  mutable std::shared_ptr<RobinEvaluator> sibling_lo_, sibling_hi_;
};

// Closed forms for the unit ball.
// Center value of the Robin function.
double g_ball_analytic(double lambda);
// Green function from the center, 0 < r < 1.
double G_ball_analytic(double lambda, double r);
// Robin function at distance a from the center, 0 <= a < 1, by the
// modified-spherical-Bessel image series.
double g_ball_radial(double lambda, double a);
// Root of the center value: the critical parameter of the unit ball.
double lambda_star_ball(double tol = 1e-12);

}  // namespace lnt
