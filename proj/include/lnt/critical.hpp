#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "lnt/domain.hpp"
#include "lnt/geometry.hpp"
#include "lnt/robin.hpp"

namespace lnt {

struct CriticalOptions {
  RobinOptions robin;
  int grid_res = 9;          // grid resolution feeding sup_g
  double sup_margin = 0.0;   // forwarded to sup_g; <= 0 selects its default
  int quad_level = Domain::kDefaultQuadLevel;
  // Radius of a ball around x0 used as the region D of verify_hypotheses;
  // <= 0 selects the super-level set {g > sup g / 2} on the grid.
  double region_radius = 0.0;
};

// Root of lambda -> M_lambda = sup_Omega g_lambda, with the bisection
// history retained for diagnostics.
struct CriticalResult {
  double lambda_star = 0.0;
  Point3 argmax;          // maximizer of g at the returned lambda
  double m_at_star = 0.0; // M evaluated at the returned lambda
  double tol_achieved = 0.0;  // final bracket width
  std::vector<std::pair<double, double>> bracket;  // (lambda, M) in eval order
};

// Bisection on the strictly increasing map lambda -> M_lambda, bracketing
// by doubling/halving from lambda = 1.
CriticalResult lambda_star(const Domain& d, double tol,
                           const CriticalOptions& opts = {});

// Predicted single-bubble data slightly above critical: concentration
// point x = argmax g, scale mu = 4 g(x)/lambda, normalized height near 1.
struct BubblePrediction {
  double lambda = 0.0;
  Point3 x;
  double g_value = 0.0;
  double mu = 0.0;
  double Lambda = 1.0;
  double lambda_star = 0.0;   // critical value the prediction is relative to
  double ratio = 0.0;         // g_value / (lambda - lambda_star)
};

BubblePrediction bubble_prediction(const Domain& d, double lambda,
                                   const CriticalResult& crit,
                                   const CriticalOptions& opts = {});
// Convenience overload locating lambda_star internally to tolerance tol.
BubblePrediction bubble_prediction(const Domain& d, double lambda,
                                   double tol = 1e-4,
                                   const CriticalOptions& opts = {});

// One sample of the reduced energy profile: the measured energy of the
// ansatz at mu(Lambda) = 4 (g/lambda) Lambda against the quadratic model
// a0 + (a1^2/4a2)(g^2/lambda)(2 Lambda - Lambda^2).
struct ReducedProfilePoint {
  double Lambda = 0.0;
  double mu = 0.0;
  double energy = 0.0;
  double model = 0.0;
};

std::vector<ReducedProfilePoint> reduced_energy_profile(
    const Domain& d, double lambda, const Point3& zeta,
    const std::vector<double>& Lambda_grid, const CriticalOptions& opts = {});

// Numerical check of the two structural hypotheses at (lambda0, x0):
// (a) g attains its zero supremum on a region D and stays below on its
// boundary; (b) the Hessian of g at x0 is non-singular. Report only.
struct HypothesesReport {
  double lambda = 0.0;
  Point3 x0;
  double g0 = 0.0;
  Vec3 grad;
  std::array<std::array<double, 3>, 3> hessian{};
  std::array<double, 3> eigenvalues{};  // ascending
  double min_abs_eigenvalue = 0.0;
  double nondegeneracy_threshold = 0.0;
  bool hessian_nonsingular = false;
  bool gradient_critical = false;  // |grad| small on the same scale
  double g_scale = 0.0;            // max |g| over the probe grid
  double sup_D = 0.0;
  double sup_boundary_D = 0.0;
  bool condition_a = false;  // sup_D > sup over the boundary sampling
};

HypothesesReport verify_hypotheses(const Domain& d, double lambda0,
                                   const Point3& x0,
                                   const CriticalOptions& opts = {});

std::string to_json(const CriticalResult& r);
std::string to_json(const BubblePrediction& p);
std::string to_json(const HypothesesReport& r);
// Bracket history as "lambda,M" rows.
std::string bracket_csv(const CriticalResult& r);

}  // namespace lnt
