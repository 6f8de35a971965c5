#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lnt/domain.hpp"
#include "lnt/geometry.hpp"

namespace lnt {

struct SolverOptions {
  int n = 400;                       // charge count; collocation oversamples 2x
  double inflation = 0.5;            // charge offset, fraction of local radius
  double svd_cut = 1e-12;            // relative singular-value cutoff
  double residual_threshold = 1e-3;  // flag solves with worse boundary fit
};

struct SolveDiagnostics {
  double residual_inf = 0.0;
  double threshold = 0.0;
  bool flagged = false;
};

// Superposition of exterior Yukawa charges; satisfies -Delta u + lambda u = 0
// inside the domain by construction.
class HelmholtzField {
 public:
  HelmholtzField() = default;

  double eval(const Point3& x) const;
  Vec3 eval_grad(const Point3& x) const;
  // Shares the exponentials between value and gradient.
  void eval_both(const Point3& x, double& value, Vec3& grad) const;

  double lambda() const { return lambda_; }
  const SolveDiagnostics& diagnostics() const { return diag_; }

 private:
  friend class NeumannSolver;
  std::shared_ptr<const std::vector<Point3>> charges_;
  std::vector<double> coef_;
  double lambda_ = 0.0;
  SolveDiagnostics diag_;
};

// Interior Neumann solver for -Delta u + lambda u = 0 via the method of
// fundamental solutions: charges on an inflated copy of the boundary,
// flux collocation in truncated-SVD least squares. Immutable after
// construction; solves may run concurrently.
class NeumannSolver {
 public:
  NeumannSolver(const Domain& d, double lambda, const SolverOptions& opts = {});
  ~NeumannSolver();
  NeumannSolver(NeumannSolver&&) noexcept;
  NeumannSolver& operator=(NeumannSolver&&) noexcept;

  // flux(point, outward normal) sampled at the collocation points.
  HelmholtzField solve(const std::function<double(const Point3&, const Vec3&)>& flux) const;
  HelmholtzField solve(const std::vector<double>& flux_values) const;

  double lambda() const;
  const BoundarySample& collocation() const;
  const std::vector<Point3>& charges() const;

  double sigma_max() const;
  double sigma_min_kept() const;
  int rank() const;
  std::string diagnostics_json() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Volume potential of a smooth source against the screened kernel:
// integral over the domain of Phi_lambda(x-y) source(y) dy. The weak
// singularity is subtracted: the source is split as
// [source - source(x)] integrated by q plus source(x) times the kernel
// integral computed by a polar rule centered at x.
double newton_potential(double lambda, const Domain& d,
                        const std::function<double(const Point3&)>& source,
                        const Point3& x, const VolumeQuadrature& q);

}  // namespace lnt
