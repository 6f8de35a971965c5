#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "lnt/domain.hpp"
#include "lnt/field_solver.hpp"
#include "lnt/geometry.hpp"

namespace lnt {

// Coefficients of the two-term energy expansion
//   E(U_{zeta,mu}) = a0 + a1 mu g - a2 lambda mu^2 - a3 mu^2 g^2 + O(mu^{3-}).
struct EnergyConstants {
  double a0, a1, a2, a3;
};

// Closed forms: a0 = sqrt(3) pi^2 / 4, a1 = 8 sqrt(3) pi^2,
// a2 = sqrt(3) pi^2, a3 = 120 sqrt(3) pi^4.
EnergyConstants energy_constants();
// The same four numbers recomputed from their defining integrals over R^3,
// reduced to 1D radial quadrature.
EnergyConstants energy_constants_from_integrals();

// Radial quadrature of the standard-bubble powers over R^3.
double bubble_w6_integral();  // = 3 a0
double bubble_w5_integral();  // = 4 * 3^{1/4} * pi
double bubble_w4_integral();  // = 3 pi^2

struct AnsatzOptions {
  SolverOptions solver;
  double margin_factor = 0.02;
  int quad_level = Domain::kDefaultQuadLevel;
};

// U_{zeta,mu} = w_{zeta,mu} + pi_{zeta,mu}, where pi solves
//   -Delta pi + lambda pi = -lambda w in Omega, d(pi)/dnu = -d(w)/dnu,
// assembled as pi = -lambda * (free-space potential of w) + homogeneous
// correction. The boundary flux of U vanishes up to the solver residual.
class BubbleAnsatz {
 public:
  BubbleAnsatz(const Domain& d, double lambda, const Point3& zeta, double mu,
               const AnsatzOptions& opts = {});
  // Shares an existing factorization built on the same domain.
  BubbleAnsatz(std::shared_ptr<const NeumannSolver> solver, const Domain& d,
               double lambda, const Point3& zeta, double mu,
               double margin_factor = 0.02);
  ~BubbleAnsatz();
  BubbleAnsatz(BubbleAnsatz&&) noexcept;
  BubbleAnsatz& operator=(BubbleAnsatz&&) noexcept;

  double u(const Point3& x) const;
  Vec3 grad_u(const Point3& x) const;
  void eval_both(const Point3& x, double& value, Vec3& grad) const;
  double w(const Point3& x) const;
  double pi(const Point3& x) const;

  double lambda() const;
  double mu() const;
  const Point3& zeta() const;
  // Peak value U(zeta), the natural scale for residual reporting.
  double peak() const;
  // Inf-norm of the boundary flux of U at the collocation points.
  double flux_residual() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// (1/2) int |grad u|^2 + (lambda/2) int u^2 - (1/6) int u^6 over the
// quadrature; compensated summation.
double energy(double lambda, const std::function<double(const Point3&)>& u,
              const std::function<Vec3(const Point3&)>& grad_u,
              const VolumeQuadrature& q);
double energy(const BubbleAnsatz& U, const VolumeQuadrature& q);

struct ExpansionReport {
  std::vector<double> mu;
  std::vector<double> e_measured;
  std::vector<double> e_model;
  std::vector<double> remainder;
  double g_value = 0.0;  // g_lambda(zeta) feeding the model
  bool monotone = false;  // |remainder| decreasing along the (decreasing) mu list
  double slope = std::numeric_limits<double>::quiet_NaN();  // log|r| vs log mu
  std::string csv() const;  // mu,E_measured,E_model,remainder
};

// Measures E(U_{zeta,mu}) against the expansion model over a decreasing mu
// list; the slope is reported only when the remainders shrink monotonically.
ExpansionReport expansion_check(const Domain& d, double lambda,
                                const Point3& zeta, std::vector<double> mu_list,
                                const AnsatzOptions& opts = {});

// Radial profile D0 of the first mu-correction to mu^{-1/2} pi near the
// bubble: (r^2 D0')' = -lambda 3^{1/4} (r^2/sqrt(1+r^2) - r), regular at 0,
// D0 -> 0 at infinity with tail (c1 log r + c2)/r.
struct D0Solution {
  std::vector<double> r;      // adaptive grid, r[0] = 0
  std::vector<double> value;  // D0 on the grid (tail-matched)
  std::vector<double> deriv;  // D0' on the grid
  double c1 = 0.0, c2 = 0.0;  // matched tail coefficients
  double limit = 0.0;         // constant subtracted to enforce decay
  double r_max = 0.0;

  double at(double radius) const;  // Hermite interpolation; tail beyond r_max
  double origin() const { return value.front(); }
};

D0Solution d0_solve(double lambda, double r_max = 500.0);

struct PiExpansionReport {
  std::vector<double> mu;
  std::vector<Point3> probes;
  // residual[p][i]: defect of mu^{-1/2} pi(x_p) + 4 pi 3^{1/4} H(zeta,x_p)
  // + mu D0(|x_p - zeta|/mu) at mu[i]; the ablated variant drops the D0 term.
  std::vector<std::vector<double>> residual;
  std::vector<std::vector<double>> residual_ablated;
  std::vector<double> slope;          // per probe
  std::vector<double> slope_ablated;  // per probe
  bool monotone = false;
};

PiExpansionReport pi_expansion_check(const Domain& d, double lambda,
                                     const Point3& zeta,
                                     std::vector<double> mu_list,
                                     std::vector<Point3> probes,
                                     const AnsatzOptions& opts = {});

}  // namespace lnt
