#include "lnt/field_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lnt/kernels.hpp"

namespace lnt {

double HelmholtzField::eval(const Point3& x) const {
  if (!charges_) return 0.0;
  double acc = 0.0;
  for (size_t k = 0; k < coef_.size(); ++k)
    acc += coef_[k] * yukawa_phi(lambda_, (*charges_)[k], x);
  return acc;
}

Vec3 HelmholtzField::eval_grad(const Point3& x) const {
  Vec3 g{0, 0, 0};
  if (!charges_) return g;
  for (size_t k = 0; k < coef_.size(); ++k)
    g += coef_[k] * yukawa_phi_grad(lambda_, (*charges_)[k], x);
  return g;
}

void HelmholtzField::eval_both(const Point3& x, double& value, Vec3& grad) const {
  value = 0.0;
  grad = {0, 0, 0};
  if (!charges_) return;
  const double kappa = std::sqrt(lambda_);
  constexpr double kFourPi = 4.0 * M_PI;
  for (size_t k = 0; k < coef_.size(); ++k) {
    const Vec3 d = x - (*charges_)[k];
    const double r = d.norm();
    const double e = std::exp(-kappa * r) / (kFourPi * r);
    value += coef_[k] * e;
    grad += (-coef_[k] * e * (kappa * r + 1.0) / (r * r)) * d;
  }
}

struct NeumannSolver::Impl {
  Domain domain;
  double lambda;
  SolverOptions opts;
  std::shared_ptr<const std::vector<Point3>> charges;
  BoundarySample colloc;
  Eigen::MatrixXd A;
  Eigen::BDCSVD<Eigen::MatrixXd> svd;

  Impl(const Domain& d, double lam, const SolverOptions& o)
      : domain(d), lambda(lam), opts(o) {
    if (!(lam > 0.0) || !std::isfinite(lam))
      throw std::invalid_argument("solver: lambda must be positive");
    if (o.n < 50) throw std::invalid_argument("solver: need at least 50 charges");
    if (!(o.inflation > 0.0) || o.inflation > 1.0)
      throw std::invalid_argument("solver: inflation must lie in (0, 1]");
    if (!(o.svd_cut > 0.0) || !(o.svd_cut < 1.0))
      throw std::invalid_argument("solver: svd_cut must lie in (0, 1)");

    const BoundarySample base = d.boundary_sample(o.n);
    auto pts = std::make_shared<std::vector<Point3>>();
    pts->reserve(o.n);
    for (int k = 0; k < o.n; ++k) {
      const double local = (base.points[k] - d.center()).norm();
      const Point3 c = base.points[k] + (o.inflation * local) * base.normals[k];
      if (d.contains(c))
        throw std::runtime_error("solver: charge point fell inside the domain");
      pts->push_back(c);
    }
    charges = std::move(pts);
    colloc = d.boundary_sample(2 * o.n);

    const int rows = 2 * o.n, cols = o.n;
    A.resize(rows, cols);
    for (int j = 0; j < rows; ++j)
      for (int k = 0; k < cols; ++k)
        A(j, k) = yukawa_phi_dnu(lambda, (*charges)[k], colloc.points[j],
                                 colloc.normals[j]);
    svd.compute(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(o.svd_cut);
  }
};

NeumannSolver::NeumannSolver(const Domain& d, double lambda,
                             const SolverOptions& opts)
    : impl_(std::make_unique<Impl>(d, lambda, opts)) {}
NeumannSolver::~NeumannSolver() = default;
NeumannSolver::NeumannSolver(NeumannSolver&&) noexcept = default;
NeumannSolver& NeumannSolver::operator=(NeumannSolver&&) noexcept = default;

double NeumannSolver::lambda() const { return impl_->lambda; }
const BoundarySample& NeumannSolver::collocation() const { return impl_->colloc; }
const std::vector<Point3>& NeumannSolver::charges() const { return *impl_->charges; }
double NeumannSolver::sigma_max() const { return impl_->svd.singularValues()(0); }
int NeumannSolver::rank() const { return static_cast<int>(impl_->svd.rank()); }

double NeumannSolver::sigma_min_kept() const {
  const auto& s = impl_->svd.singularValues();
  const int r = static_cast<int>(impl_->svd.rank());
  return r > 0 ? s(r - 1) : 0.0;
}

HelmholtzField NeumannSolver::solve(
    const std::function<double(const Point3&, const Vec3&)>& flux) const {
  const auto& bs = impl_->colloc;
  std::vector<double> f(bs.points.size());
  for (size_t j = 0; j < f.size(); ++j) f[j] = flux(bs.points[j], bs.normals[j]);
  return solve(f);
}

HelmholtzField NeumannSolver::solve(const std::vector<double>& flux_values) const {
  const auto& imp = *impl_;
  if (flux_values.size() != imp.colloc.points.size())
    throw std::invalid_argument("solve: flux data size does not match collocation");
  Eigen::Map<const Eigen::VectorXd> f(flux_values.data(), flux_values.size());
  for (double v : flux_values)
    if (!std::isfinite(v))
      throw std::invalid_argument("solve: flux data must be finite");

  const Eigen::VectorXd alpha = imp.svd.solve(f);
  const double residual = (imp.A * alpha - f).lpNorm<Eigen::Infinity>();

  HelmholtzField out;
  out.charges_ = imp.charges;
  out.coef_.assign(alpha.data(), alpha.data() + alpha.size());
  out.lambda_ = imp.lambda;
  out.diag_.residual_inf = residual;
  out.diag_.threshold = imp.opts.residual_threshold;
  out.diag_.flagged = residual > imp.opts.residual_threshold;
  return out;
}

std::string NeumannSolver::diagnostics_json() const {
  const auto& s = impl_->svd.singularValues();
  std::ostringstream os;
  os.precision(17);
  os << "{\"lambda\":" << impl_->lambda << ",\"n_charges\":" << impl_->opts.n
     << ",\"n_collocation\":" << 2 * impl_->opts.n
     << ",\"inflation\":" << impl_->opts.inflation
     << ",\"svd_cut\":" << impl_->opts.svd_cut
     << ",\"sigma_max\":" << s(0)
     << ",\"sigma_min_kept\":" << sigma_min_kept()
     << ",\"rank\":" << rank() << "}";
  return os.str();
}

double newton_potential(double lambda, const Domain& d,
                        const std::function<double(const Point3&)>& source,
                        const Point3& x, const VolumeQuadrature& q) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("newton_potential: lambda must be positive");
  if (!d.contains(x))
    throw std::domain_error("newton_potential: evaluation point outside the domain");

  const double fx = source(x);
  double acc = 0.0, carry = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    const double r = (x - q.nodes[i]).norm();
    if (r < 1e-300) continue;
    const double term =
        q.weights[i] * yukawa_phi(lambda, x, q.nodes[i]) * (source(q.nodes[i]) - fx);
    const double t = acc + term;
    carry += std::abs(acc) >= std::abs(term) ? (acc - t) + term : (term - t) + acc;
    acc = t;
  }

  // Kernel mass against the polar rule centered at x; the r^2 volume factor
  // absorbs the 1/r singularity.
  double mass = 0.0;
  if (fx != 0.0) {
    const auto polar =
        d.volume_quadrature(x, 0.1 * d.diameter(), Domain::kDefaultQuadLevel);
    for (size_t i = 0; i < polar.nodes.size(); ++i)
      mass += polar.weights[i] * yukawa_phi(lambda, x, polar.nodes[i]);
  }
  return acc + carry + fx * mass;
}

}  // namespace lnt
