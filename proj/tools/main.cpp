#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lnt/bubble.hpp"
#include "lnt/config.hpp"
#include "lnt/critical.hpp"
#include "lnt/domain.hpp"
#include "lnt/robin.hpp"

namespace {

using namespace lnt;

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  write_atomic(out_path, content);
}

int cmd_ball_analytic(const std::vector<double>& lambdas,
                      const std::string& out) {
  const double ls = lambda_star_ball(1e-12);
  const double s = std::sqrt(ls);
  const double q = (s - 1.0) / (s + 1.0) * std::exp(2.0 * s);
  std::string rep;
  rep += "lambda_star = " + format_full(ls) + "\n";
  rep += "defining_residual = " + format_full(std::abs(q - 1.0)) + "\n";
  for (double lam : lambdas)
    rep += "g(" + format_full(lam) + ") = " + format_full(g_ball_analytic(lam)) +
           "\n";
  emit(out, rep);
  return 0;
}

int cmd_robin_map(const RunConfig& cfg, bool verbose) {
  RobinOptions ro;
  ro.solver = cfg.solver;
  const RobinEvaluator ev(cfg.domain, cfg.lambda, ro);
  const Point3 c = cfg.domain.center();
  const double rad = cfg.domain.bounding_radius();
  const int res = cfg.grid_res;

  std::string csv = "x,y,z,g,residual\n";
  int rows = 0;
  for (int ix = 0; ix < res; ++ix)
    for (int iy = 0; iy < res; ++iy)
      for (int iz = 0; iz < res; ++iz) {
        const Point3 p{c.x + rad * (2.0 * ix / (res - 1) - 1.0),
                       c.y + rad * (2.0 * iy / (res - 1) - 1.0),
                       c.z + rad * (2.0 * iz / (res - 1) - 1.0)};
        if (!cfg.domain.contains(p) ||
            cfg.domain.dist_to_boundary(p) < ev.margin())
          continue;
        const GResult r = ev.g_full(p);
        csv += format_full(p.x) + "," + format_full(p.y) + "," +
               format_full(p.z) + "," + format_full(r.value) + "," +
               format_full(r.residual) + "\n";
        ++rows;
      }
  if (verbose) std::fprintf(stderr, "robin-map: %d rows\n", rows);
  emit(cfg.out, csv);
  return 0;
}

int cmd_lambda_star(const RunConfig& cfg, const std::string& bracket_out,
                    bool verbose) {
  CriticalOptions co;
  co.robin.solver = cfg.solver;
  co.grid_res = cfg.grid_res;
  const CriticalResult res = lambda_star(cfg.domain, cfg.tol, co);
  if (verbose)
    for (const auto& [lam, m] : res.bracket)
      std::fprintf(stderr, "lambda-star: M(%.12g) = %.6g\n", lam, m);
  if (!bracket_out.empty()) write_atomic(bracket_out, bracket_csv(res));
  emit(cfg.out, to_json(res) + "\n");
  return 0;
}

int cmd_energy_sweep(const RunConfig& cfg, const std::string& summary_out,
                     bool verbose) {
  AnsatzOptions ao;
  ao.solver = cfg.solver;
  const ExpansionReport rep = expansion_check(
      cfg.domain, cfg.lambda, cfg.domain.center(), cfg.mu_list, ao);
  if (verbose)
    std::fprintf(stderr, "energy-sweep: g = %.12g, slope = %.4g\n",
                 rep.g_value, rep.slope);
  if (!summary_out.empty()) {
    nlohmann::json j;
    j["g_value"] = rep.g_value;
    j["monotone"] = rep.monotone;
    j["slope"] = rep.monotone ? nlohmann::json(rep.slope) : nlohmann::json();
    write_atomic(summary_out, j.dump(2) + "\n");
  }
  emit(cfg.out, rep.csv());
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  int failed = 0;
  auto report = [&](bool pass, const char* name, const std::string& detail) {
    std::printf("%s  %-18s %s\n", pass ? "PASS" : "FAIL", name,
                detail.c_str());
    if (!pass) ++failed;
  };

  // Energy constants against their defining integrals.
  {
    const EnergyConstants cf = energy_constants();
    const EnergyConstants cq = energy_constants_from_integrals();
    double worst = 0.0;
    const double pairs[4][2] = {{cf.a0, cq.a0}, {cf.a1, cq.a1},
                                {cf.a2, cq.a2}, {cf.a3, cq.a3}};
    for (const auto& pr : pairs)
      worst = std::max(worst, std::abs(pr[1] / pr[0] - 1.0));
    report(worst < 1e-8, "constants", "max rel diff = " + format_full(worst));
  }

  RobinOptions ro;
  ro.solver = cfg.solver;
  const RobinEvaluator ev(cfg.domain, cfg.lambda, ro);
  const Point3 c = cfg.domain.center();
  const double rad = cfg.domain.bounding_radius();

  // Green symmetry.
  {
    const Point3 x = c + Vec3{0.35 * rad, 0.05 * rad, -0.1 * rad};
    const Point3 y = c + Vec3{-0.2 * rad, -0.3 * rad, 0.15 * rad};
    const double gxy = ev.green(x, y), gyx = ev.green(y, x);
    const double diff = std::abs(gxy - gyx);
    report(diff < 1e-6 * std::max(1.0, std::abs(gxy)), "green-symmetry",
           "|G(x,y) - G(y,x)| = " + format_full(diff));
  }

  // Pointwise monotonicity in lambda.
  {
    const double d1 = ev.dg_dlambda(c);
    const double d2 = ev.dg_dlambda(c + Vec3{0.3 * rad, 0.1 * rad, 0.0});
    report(d1 > 0.0 && d2 > 0.0, "monotonicity",
           "dg/dlambda = " + format_full(d1) + ", " + format_full(d2));
  }

  // Boundary blow-up of the regular part.
  {
    const BoundarySample bs = cfg.domain.boundary_sample(16);
    const Point3 b = bs.points[0];
    const Vec3 nu = bs.normals[0];
    const double diam = cfg.domain.diameter();
    const double d1 = 0.05 * diam, d2 = 0.025 * diam;
    const double g1 = ev.g(b - d1 * nu), g2 = ev.g(b - d2 * nu);
    const bool ok = g1 < -1.0 / (16.0 * M_PI * d1) &&
                    g2 < -1.0 / (16.0 * M_PI * d2) && g2 < g1;
    report(ok, "boundary-blowup",
           "g(d) = " + format_full(g1) + ", " + format_full(g2));
  }

  // Small-lambda trend: lambda*g(c) settles toward a negative constant.
  {
    const double ls[3] = {0.1, 0.05, 0.025};
    double p[3];
    for (int i = 0; i < 3; ++i)
      p[i] = ls[i] * RobinEvaluator(cfg.domain, ls[i], ro).g(c);
    const bool ok = p[0] < 0.0 && p[1] < 0.0 && p[2] < 0.0 &&
                    std::abs(p[2] - p[1]) < std::abs(p[1] - p[0]);
    report(ok, "small-lambda",
           "lambda*g = " + format_full(p[0]) + ", " + format_full(p[1]) +
               ", " + format_full(p[2]));
  }

  // Critical parameter and the energy expansion above it.
  {
    CriticalOptions co;
    co.robin.solver = cfg.solver;
    co.grid_res = cfg.grid_res;
    const CriticalResult crit = lambda_star(cfg.domain, 1e-3, co);
    report(crit.tol_achieved <= 1e-3 && crit.lambda_star > 0.0,
           "critical-search", "lambda* = " + format_full(crit.lambda_star));

    AnsatzOptions ao;
    ao.solver = cfg.solver;
    const ExpansionReport rep =
        expansion_check(cfg.domain, crit.lambda_star + 0.05, crit.argmax,
                        cfg.mu_list, ao);
    report(rep.monotone && rep.slope >= 2.7, "expansion-slope",
           "slope = " + format_full(rep.slope));
  }

  if (failed == 0) {
    std::printf("all checks passed\n");
    return 0;
  }
  std::printf("%d check(s) failed\n", failed);
  return 2;
}

struct CommonArgs {
  std::string config, out;
  double lambda = 0.0;
  int grid = 0;
  std::vector<double> mus;
  CLI::Option* olam = nullptr;
  CLI::Option* ogrid = nullptr;
  CLI::Option* omus = nullptr;
  CLI::Option* oout = nullptr;
};

void wire_common(CLI::App* sub, CommonArgs& a, bool with_mus) {
  sub->add_option("--config", a.config, "JSON configuration file")
      ->check(CLI::ExistingFile);
  a.oout = sub->add_option("--out", a.out,
                           "output path (atomic write; default stdout)");
  a.olam = sub->add_option("--lambda", a.lambda, "override lambda");
  a.ogrid = sub->add_option("--grid", a.grid, "override grid resolution");
  if (with_mus)
    a.omus = sub->add_option("--mu-list", a.mus, "override the mu sweep");
}

RunConfig resolve(const CommonArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  if (a.olam->count() > 0) cfg.lambda = a.lambda;
  if (a.ogrid->count() > 0) cfg.grid_res = a.grid;
  if (a.omus && a.omus->count() > 0) cfg.mu_list = a.mus;
  if (a.oout->count() > 0) cfg.out = a.out;
  if (!(cfg.lambda > 0.0))
    throw std::invalid_argument("lambda must be positive");
  if (cfg.grid_res < 3)
    throw std::invalid_argument("grid resolution must be at least 3");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin function and bubble-energy toolkit for -Delta+lambda "
               "with Neumann boundary"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress to stderr");

  auto* ball = app.add_subcommand("ball-analytic",
                                  "closed-form unit-ball report");
  std::vector<double> lambdas = {0.5, 1.0, 2.0, 4.0, 10.0};
  std::string ball_out;
  ball->add_option("--lambdas", lambdas, "lambda values for the g table");
  ball->add_option("--out", ball_out, "output path (default stdout)");

  CommonArgs rm, lsa, es, vf;
  auto* rmap = app.add_subcommand("robin-map",
                                  "Robin function on an interior grid (CSV)");
  wire_common(rmap, rm, false);
  auto* lstar = app.add_subcommand("lambda-star",
                                   "critical parameter search (JSON)");
  wire_common(lstar, lsa, false);
  std::string bracket_out;
  lstar->add_option("--bracket-out", bracket_out,
                    "write the bisection history CSV");
  double tol_override = 0.0;
  auto* otol = lstar->add_option("--tol", tol_override,
                                 "override the bisection tolerance");
  auto* esweep = app.add_subcommand(
      "energy-sweep", "bubble-ansatz energy expansion sweep (CSV)");
  wire_common(esweep, es, true);
  std::string summary_out;
  esweep->add_option("--summary-out", summary_out, "write fit summary JSON");
  auto* verify = app.add_subcommand("verify", "run the property battery");
  wire_common(verify, vf, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ball->parsed()) return cmd_ball_analytic(lambdas, ball_out);
    if (rmap->parsed()) return cmd_robin_map(resolve(rm), verbose);
    if (lstar->parsed()) {
      RunConfig cfg = resolve(lsa);
      if (otol->count() > 0) cfg.tol = tol_override;
      return cmd_lambda_star(cfg, bracket_out, verbose);
    }
    if (esweep->parsed())
      return cmd_energy_sweep(resolve(es), summary_out, verbose);
    if (verify->parsed()) return cmd_verify(resolve(vf));
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
