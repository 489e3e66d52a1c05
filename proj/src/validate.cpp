#include "gfbsde/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gfbsde/csv.hpp"
#include "gfbsde/lattice.hpp"
#include "gfbsde/mollifier.hpp"
#include "gfbsde/numerics.hpp"
#include "gfbsde/pde.hpp"
#include "gfbsde/picard.hpp"
#include "gfbsde/rng.hpp"

namespace gfbsde {

CoefficientBundle gheat_bundle(double T) {
  return CoefficientBundle::from_sources("0", "0", "1", "0", "0", "x^2", 1.0, 1.5, 0.5, 4.0, T);
}

CoefficientBundle tanh_bundle(double T) {
  return CoefficientBundle::from_sources("0", "0", "1", "0", "0", "tanh(x)", 1.0, 1.5, 0.5, 4.0, T);
}

CoefficientBundle manufactured_bundle(double T) {
  // with sigma_lo = sigma_hi = 1 the scheme solves u_t + u_xx/2 + f = 0;
  // f = -u*_t - u*_xx/2 = -exp(-(T-t)) tanh(x)^3 makes u* the solution
  std::ostringstream f_src;
  f_src << "-exp(-(" << format_g17(T) << "-t))*tanh(x)^3";
  return CoefficientBundle::from_sources("0", "0", "1", f_src.str(), "0", "tanh(x)", 1.0, 1.5, 0.5,
                                         4.0, T);
}

double manufactured_reference(double T, double t, double x) {
  return std::exp(-(T - t)) * std::tanh(x);
}

CoefficientBundle coupled_bundle(double T) {
  return CoefficientBundle::from_sources("0.3*tanh(y)", "0.1*sin(y)", "1 + 0.25*tanh(y)",
                                         "0.4*cos(x) - 0.3*y + 0.2*z",
                                         "0.1*tanh(z) + 0.05*sin(y)", "tanh(x)", 1.0, 1.3, 0.5,
                                         4.0, T);
}

MomentErrors lattice_moment_errors(const GParams& params, double T, int N) {
  MomentErrors e;
  const ExprPtr x2 = parse("x^2");
  const ExprPtr neg_x2 = parse("-x^2");
  const ExprPtr x1 = parse("x");
  e.x2_error = std::fabs(g_expectation(params, x2, T, N) - params.gamma_hi() * T);
  e.negx2_error = std::fabs(g_expectation(params, neg_x2, T, N) + params.gamma_lo() * T);
  e.x_value = g_expectation(params, x1, T, N);
  return e;
}

namespace {

// phi(x0 + .) as an expression: substitute x -> x + x0
ExprPtr shift_expr(const ExprPtr& e, double x0) {
  switch (e->op()) {
    case Expr::Op::Num: return e;
    case Expr::Op::Variable:
      if (e->var() == Var::X) {
        return Expr::binary(Expr::Op::Add, Expr::variable(Var::X), Expr::number(x0));
      }
      return e;
    default:
      if (e->rhs()) {
        return Expr::binary(e->op(), shift_expr(e->lhs(), x0), shift_expr(e->rhs(), x0));
      }
      return Expr::unary(e->op(), shift_expr(e->lhs(), x0));
  }
}

}  // namespace

FkGap feynman_kac_gap(const GParams& params, const Grid1D& grid, int lattice_n) {
  const CoefficientBundle c = tanh_bundle(grid.T);
  const DecouplingField u = solve_pde(c, params, grid);

  FkGap out;
  for (const double x0 : {-1.0, 0.0, 1.0}) {
    const double lat = g_expectation(params, shift_expr(c.phi, x0), grid.T, lattice_n);
    const double pde = u.value(0.0, x0);
    out.gap = std::max(out.gap, std::fabs(pde - lat));
    if (x0 == 0.0) {
      out.pde_at_zero = pde;
      out.lattice_at_zero = lat;
    }
  }
  return out;
}

std::vector<ManufacturedLevel> manufactured_errors(const Grid1D& base_grid,
                                                   const std::vector<int>& nx_levels, double T) {
  const CoefficientBundle c = manufactured_bundle(T);
  const GParams classical{1.0, 1.0};
  std::vector<ManufacturedLevel> out;
  for (const int nx : nx_levels) {
    Grid1D g = base_grid;
    g.nx = nx;
    g.T = T;
    g.nt = 0;
    PdeMeta meta;
    const DecouplingField u = solve_pde(c, classical, g, &meta);
    ManufacturedLevel lvl;
    lvl.nx = nx;
    lvl.dx = g.dx();
    lvl.dt = meta.dt;
    for (int k = 0; k <= meta.nt; ++k) {
      for (int j = 0; j < nx; ++j) {
        const double x = g.x_of(j);
        if (std::fabs(x) > 3.0) continue;  // keep clear of the truncation boundary
        lvl.error = std::max(lvl.error,
                             std::fabs(u.at(k, j) - manufactured_reference(T, k * meta.dt, x)));
      }
    }
    out.push_back(lvl);
  }
  return out;
}

KInvariantStats k_invariant_stats(const CoefficientBundle& c, const GParams& params,
                                  const DecouplingField& field, const VolatilityScenario& scenario,
                                  int n_paths, int n_steps, std::uint64_t seed) {
  const PathSet set = simulate(c, params, field, scenario, n_paths, n_steps, seed);
  KInvariantStats stats;
  stats.paths_exited = set.n_exited();
  stats.eps_fd = 10.0 * field.second_difference_noise() * (set.times[1] - set.times[0]);
  std::vector<double> kt;
  kt.reserve(set.paths.size());
  double max_inc = -std::numeric_limits<double>::infinity();
  for (const PathQuadruple& p : set.paths) {
    if (p.exited) continue;
    for (std::size_t k = 0; k + 1 < p.k.size(); ++k) {
      max_inc = std::max(max_inc, p.k[k + 1] - p.k[k]);
    }
    kt.push_back(p.k.back());
  }
  stats.max_increment = max_inc;
  const MeanSe ms = mean_se(kt);
  stats.mean_kt = ms.mean;
  stats.se_kt = ms.se;
  return stats;
}

double field_gap_at_zero(const DecouplingField& a, const DecouplingField& b, double x_lo,
                         double x_hi, int n_probe) {
  double gap = 0.0;
  for (int i = 0; i < n_probe; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (n_probe - 1);
    gap = std::max(gap, std::fabs(a.value(0.0, x) - b.value(0.0, x)));
  }
  return gap;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) { return format_g17(v); }

CheckResult check_g_function(const RunConfig& cfg) {
  CheckResult r{"g-core properties", true, ""};
  const GParams& p = cfg.g;
  Rng rng(Rng::stream_seed(cfg.seed, "validate-g", 0));
  double worst_formula = 0.0, worst_mono = 0.0, worst_sub = 0.0, worst_hom = 0.0;
  bool argmax_ok = true;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double a = 20.0 * rng.next_uniform() - 10.0;
    const double b = 20.0 * rng.next_uniform() - 10.0;
    const double lam = 4.0 * rng.next_uniform();
    const double ge = g_eval(p, a);
    const double direct =
        0.5 * p.sigma_hi * p.sigma_hi * std::max(a, 0.0) - 0.5 * p.sigma_lo * p.sigma_lo * std::max(-a, 0.0);
    worst_formula = std::max(worst_formula, std::fabs(ge - direct) / (1.0 + std::fabs(a)));
    if (0.5 * g_argmax(p, a) * a != ge) argmax_ok = false;
    const double hi = std::max(a, b), lo = std::min(a, b);
    worst_mono =
        std::max(worst_mono, 0.5 * p.gamma_lo() * (hi - lo) - (g_eval(p, hi) - g_eval(p, lo)));
    worst_sub = std::max(worst_sub, g_eval(p, a + b) - (g_eval(p, a) + g_eval(p, b)));
    worst_hom = std::max(worst_hom,
                         std::fabs(g_eval(p, lam * a) - lam * ge) / (1.0 + std::fabs(lam * ge)));
  }
  const double tol = 1e-12;
  r.pass = worst_formula <= 1e-15 && argmax_ok && worst_mono <= tol && worst_sub <= tol &&
           worst_hom <= 1e-14;
  r.detail = "formula=" + fmt(worst_formula) + " mono_gap=" + fmt(worst_mono) +
             " subadd_gap=" + fmt(worst_sub) + " homog=" + fmt(worst_hom) +
             (argmax_ok ? " argmax=exact" : " argmax=BROKEN");
  return r;
}

CheckResult check_lattice_moments(const RunConfig& cfg) {
  CheckResult r{"lattice moments", true, ""};
  const MomentErrors coarse = lattice_moment_errors(cfg.g, 1.0, 200);
  const MomentErrors fine = lattice_moment_errors(cfg.g, 1.0, 800);
  const bool within = coarse.x2_error <= 0.02 && coarse.negx2_error <= 0.02;
  // the pinned recursion is exact on quadratics, so the error-halving
  // clause passes vacuously below the machine floor
  const bool halves_x2 = coarse.x2_error <= 1e-10 ||
                         (fine.x2_error / coarse.x2_error >= 0.4 &&
                          fine.x2_error / coarse.x2_error <= 0.6);
  const bool halves_neg = coarse.negx2_error <= 1e-10 ||
                          (fine.negx2_error / coarse.negx2_error >= 0.4 &&
                           fine.negx2_error / coarse.negx2_error <= 0.6);
  const bool x_zero = std::fabs(coarse.x_value) <= 5e-13;
  r.pass = within && halves_x2 && halves_neg && x_zero;
  r.detail = "x2_err=" + fmt(coarse.x2_error) + " negx2_err=" + fmt(coarse.negx2_error) +
             " x_value=" + fmt(coarse.x_value);
  return r;
}

CheckResult check_feynman_kac(const RunConfig& cfg) {
  CheckResult r{"pde-vs-lattice consistency", true, ""};
  const FkGap gap = feynman_kac_gap(cfg.g, cfg.grid, 400);
  r.pass = gap.gap <= 5e-3;
  r.detail = "gap=" + fmt(gap.gap) + " u_pde(0,0)=" + fmt(gap.pde_at_zero) +
             " lattice=" + fmt(gap.lattice_at_zero);
  return r;
}

CheckResult check_manufactured(const RunConfig& cfg) {
  CheckResult r{"manufactured solution recovery", true, ""};
  Grid1D base = cfg.grid;
  base.x_min = -6.0;
  base.x_max = 6.0;
  const auto levels = manufactured_errors(base, {61, 121, 241}, 0.5);
  const double order1 = std::log2(levels[0].error / levels[1].error);
  const double order2 = std::log2(levels[1].error / levels[2].error);
  const double c_fit = levels[0].error / (levels[0].dx * levels[0].dx + levels[0].dt);
  bool bounded = true;
  for (const auto& lvl : levels) {
    bounded = bounded && lvl.error <= 1.25 * c_fit * (lvl.dx * lvl.dx + lvl.dt);
  }
  r.pass = order1 >= 1.8 && order2 >= 1.8 && bounded;
  r.detail = "errors=" + fmt(levels[0].error) + "," + fmt(levels[1].error) + "," +
             fmt(levels[2].error) + " orders=" + fmt(order1) + "," + fmt(order2);
  return r;
}

CheckResult check_k_invariants(const RunConfig& cfg, const std::string& artifact_dir) {
  CheckResult r{"path K invariants and worst-case scenario", true, ""};
  const double T = 1.0;
  CoefficientBundle c = gheat_bundle(T);
  const GParams& p = cfg.g;

  // analytic field for the quadratic terminal: u = x^2 + sigma_hi^2 (T-t)
  Grid1D wide;
  wide.x_min = -12.0;
  wide.x_max = 12.0;
  wide.nx = 481;
  wide.T = T;
  wide.nt = 8;
  const DecouplingField analytic = DecouplingField::sample(
      wide, [&](double t, double x) { return x * x + p.gamma_hi() * (T - t); });

  const int n_steps = 250;
  const KInvariantStats worst = k_invariant_stats(c, p, analytic, VolatilityScenario::worst_case(),
                                                  cfg.n_paths, n_steps, cfg.seed);
  const KInvariantStats low = k_invariant_stats(c, p, analytic,
                                                VolatilityScenario::constant(p.gamma_lo()),
                                                cfg.n_paths, n_steps, cfg.seed);

  // numeric-field variant ties increments to the field-noise tolerance
  Grid1D solve_grid = wide;
  solve_grid.nt = 0;
  const DecouplingField numeric = solve_pde(c, p, solve_grid);
  const KInvariantStats numeric_worst = k_invariant_stats(
      c, p, numeric, VolatilityScenario::worst_case(), cfg.n_paths, n_steps, cfg.seed);

  const bool analytic_nonpos = worst.max_increment <= 0.0 && low.max_increment <= 0.0;
  const bool worst_centered = std::fabs(worst.mean_kt) <= 3.0 * worst.se_kt + 1e-15;
  const bool degenerate = p.gamma_hi() - p.gamma_lo() <= 1e-15;
  const bool low_negative = degenerate ? std::fabs(low.mean_kt) <= 3.0 * low.se_kt + 1e-15
                                       : low.mean_kt < -3.0 * low.se_kt;
  const bool numeric_ok = numeric_worst.max_increment <= std::max(0.0, numeric_worst.eps_fd);

  r.pass = analytic_nonpos && worst_centered && low_negative && numeric_ok;
  r.detail = "max_inc=" + fmt(worst.max_increment) + " meanK*=" + fmt(worst.mean_kt) +
             " meanK_lo=" + fmt(low.mean_kt) + " se_lo=" + fmt(low.se_kt) +
             " numeric_max_inc=" + fmt(numeric_worst.max_increment) +
             " eps_fd=" + fmt(numeric_worst.eps_fd);

  if (!artifact_dir.empty()) {
    const PathSet set = simulate(c, p, analytic, VolatilityScenario::worst_case(),
                                 std::min(cfg.n_paths, 20), n_steps, cfg.seed);
    CsvWriter csv(artifact_dir + "/paths.csv", {"path_id", "t", "X", "Y", "Z", "K"});
    for (std::size_t pid = 0; pid < set.paths.size(); ++pid) {
      const auto& path = set.paths[pid];
      for (std::size_t k = 0; k < set.times.size(); ++k) {
        csv.row({static_cast<double>(pid), set.times[k], path.x[k], path.y[k], path.z[k],
                 path.k[k]});
      }
    }
  }
  return r;
}

CheckResult check_picard(const RunConfig& cfg, const std::string& artifact_dir) {
  CheckResult r{"contraction-vs-pde agreement", true, ""};
  const CoefficientBundle& c = cfg.coefficients;
  const double T = c.T;
  const double horizon = std::min(0.05, T);

  std::vector<double> terminal(static_cast<std::size_t>(cfg.grid.nx));
  for (int j = 0; j < cfg.grid.nx; ++j) terminal[static_cast<std::size_t>(j)] = c.eval_phi(cfg.grid.x_of(j));

  Grid1D cell = cfg.grid;
  cell.nt = 0;
  const PicardResult pr = picard_solve(c, cfg.g, T - horizon, T, terminal, cell);

  Grid1D pde_grid = cfg.grid;
  pde_grid.T = horizon;
  pde_grid.nt = 0;
  PdeOptions popts;
  popts.t_offset = T - horizon;
  const DecouplingField u = solve_pde(c, cfg.g, pde_grid, nullptr, popts);

  double gap = 0.0;
  if (u.grid().nt == pr.field.grid().nt) {
    for (std::size_t i = 0; i < u.values().size(); ++i) {
      gap = std::max(gap, std::fabs(u.values()[i] - pr.field.values()[i]));
    }
  } else {
    gap = field_gap_at_zero(u, pr.field, cfg.grid.x_min / 3.0, cfg.grid.x_max / 3.0, 101);
  }
  r.pass = pr.state.converged && pr.state.ratio_median <= 0.5 && gap <= 1e-3;
  r.detail = "gap=" + fmt(gap) + " ratio=" + fmt(pr.state.ratio_median) +
             " iters=" + std::to_string(pr.state.iterations);

  if (!artifact_dir.empty()) {
    ReportWriter rep(artifact_dir + "/picard.report.txt");
    rep.kv("iterations", static_cast<double>(pr.state.iterations));
    rep.kv("converged", pr.state.converged ? "true" : "false");
    rep.kv("ratio_median", pr.state.ratio_median);
    for (std::size_t i = 0; i < pr.state.distances.size(); ++i) {
      rep.kv("distance_" + std::to_string(i), pr.state.distances[i]);
    }
  }
  return r;
}

CheckResult check_stitch(const RunConfig& cfg, const std::string& artifact_dir) {
  CheckResult r{"stitch-vs-pde agreement", true, ""};
  const CoefficientBundle& c = cfg.coefficients;
  const double T = c.T;
  const double delta0 = std::min(0.1, T);

  Grid1D g = cfg.grid;
  const StitchResult st = stitch_solve(c, cfg.g, T, delta0, g);
  const DecouplingField u = solve_pde(c, cfg.g, g);

  const double gap =
      field_gap_at_zero(st.field, u, cfg.grid.x_min / 3.0, cfg.grid.x_max / 3.0, 101);
  r.pass = gap <= 5e-3 && st.seam_gap == 0.0;
  r.detail = "gap=" + fmt(gap) + " seam_gap=" + fmt(st.seam_gap) +
             " cells=" + std::to_string(st.n_cells);

  if (!artifact_dir.empty()) {
    CsvWriter csv(artifact_dir + "/stitch_t0.csv", {"x", "u"});
    for (int j = 0; j < g.nx; ++j) {
      csv.row({g.x_of(j), st.field.at(0, j)});
    }
  }
  return r;
}

CheckResult check_mollifier(const std::string& artifact_dir) {
  CheckResult r{"mollifier convergence", true, ""};
  // continuous kernel mass via an independent quadrature of rho_n
  const double mass10 =
      adaptive_simpson([](double x) { return kernel_rho_n(x, 10); }, -0.1, 0.1, 1e-12);
  const bool mass_ok = std::fabs(mass10 - 1.0) <= 1e-8;

  const int nx = 641;
  const double x_lo = -2.0, x_hi = 2.0;
  const double dx = (x_hi - x_lo) / (nx - 1);
  std::vector<double> samples(nx);
  for (int j = 0; j < nx; ++j) samples[static_cast<std::size_t>(j)] = std::fabs(x_lo + j * dx);

  auto lipschitz_quotient = [&](const std::vector<double>& v) {
    double q = 0.0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) q = std::max(q, std::fabs(v[j + 1] - v[j]) / dx);
    return q;
  };
  const double lip_in = lipschitz_quotient(samples);

  bool rate_ok = true, lip_ok = true;
  double worst_excess = 0.0;
  for (const int n : {5, 10, 20, 40}) {
    const std::vector<double> smoothed = mollify(samples, dx, n);
    double dev = 0.0;
    for (int j = 0; j < nx; ++j) {
      dev = std::max(dev, std::fabs(smoothed[static_cast<std::size_t>(j)] -
                                    samples[static_cast<std::size_t>(j)]));
    }
    worst_excess = std::max(worst_excess, dev - 1.0 / n);
    rate_ok = rate_ok && dev <= 1.0 / n + 1e-6;
    lip_ok = lip_ok && lipschitz_quotient(smoothed) <= lip_in + 1e-10;
    if (n == 10 && !artifact_dir.empty()) {
      CsvWriter csv(artifact_dir + "/mollify.csv", {"x", "smoothed"});
      for (int j = 0; j < nx; ++j) csv.row({x_lo + j * dx, smoothed[static_cast<std::size_t>(j)]});
    }
  }
  r.pass = mass_ok && rate_ok && lip_ok;
  r.detail = "kernel_mass=" + fmt(mass10) + " worst_excess_over_L_over_n=" + fmt(worst_excess);
  return r;
}

CheckResult check_dependence(const RunConfig& cfg, const std::string& artifact_dir) {
  CheckResult r{"dependence ladder", true, ""};
  CoefficientBundle c = cfg.coefficients;
  c.T = std::min(0.05, c.T);  // small-time regime for the estimate
  CoefficientBundle cp = c;
  cp.f = Expr::binary(Expr::Op::Add, c.f, Expr::number(1.0));

  DependenceConfig dcfg;
  dcfg.alpha = 0.5;
  dcfg.x0 = cfg.x0;
  dcfg.x0_prime = cfg.x0;
  dcfg.n_paths = std::min(cfg.n_paths, 2000);
  dcfg.n_steps = 50;
  dcfg.seed = cfg.seed;

  Grid1D g = cfg.grid;
  g.nt = 0;
  const std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
  const LadderReport lr = dependence_check(c, cp, cfg.g, g, dcfg, ladder);
  const PairReport self = dependence_pair(c, c, cfg.g, g, dcfg);

  const bool spread_ok = lr.ratio_spread > 0.0 && lr.ratio_spread <= 10.0;
  r.pass = lr.lhs_strictly_decreasing && spread_ok && self.exact_match;
  std::string lhs_list;
  for (const auto& pt : lr.points) lhs_list += (lhs_list.empty() ? "" : ",") + fmt(pt.report.lhs_total);
  r.detail = "lhs=[" + lhs_list + "] ratio_spread=" + fmt(lr.ratio_spread) +
             (self.exact_match ? " self=exact" : " self=NONZERO");

  if (!artifact_dir.empty()) {
    CsvWriter csv(artifact_dir + "/ladder.csv", {"eps", "lhs", "i0", "ialpha", "ratio"});
    for (const auto& pt : lr.points) {
      csv.row({pt.eps, pt.report.lhs_total, pt.report.i0, pt.report.ialpha, pt.report.ratio});
    }
  }
  return r;
}

void write_lattice_artifact(const RunConfig& cfg, const std::string& artifact_dir) {
  const LatticeField lat = conditional_field(cfg.g, parse("x^2"), 1.0, 50);
  CsvWriter csv(artifact_dir + "/lattice.csv", {"t", "x", "v"});
  for (int k = 0; k <= lat.steps; ++k) {
    for (int j = -k; j <= k; ++j) {
      csv.row({lat.t_of(k), lat.x_of(k, j), lat.value(k, j)});
    }
  }
}

}  // namespace

ValidationReport run_validation(const RunConfig& config, const std::string& artifact_dir) {
  ValidationReport report;
  auto guard = [&](const std::string& name, auto&& fn) {
    try {
      report.checks.push_back(fn());
    } catch (const Error& e) {
      report.checks.push_back({name, false, std::string("error: ") + e.what()});
    }
  };

  guard("g-core properties", [&] { return check_g_function(config); });
  guard("lattice moments", [&] { return check_lattice_moments(config); });
  guard("pde-vs-lattice consistency", [&] { return check_feynman_kac(config); });
  guard("manufactured solution recovery", [&] { return check_manufactured(config); });
  guard("path K invariants and worst-case scenario",
        [&] { return check_k_invariants(config, artifact_dir); });
  guard("contraction-vs-pde agreement", [&] { return check_picard(config, artifact_dir); });
  guard("stitch-vs-pde agreement", [&] { return check_stitch(config, artifact_dir); });
  guard("mollifier convergence", [&] { return check_mollifier(artifact_dir); });
  guard("dependence ladder", [&] { return check_dependence(config, artifact_dir); });

  if (!artifact_dir.empty()) {
    write_lattice_artifact(config, artifact_dir);
    ReportWriter rep(artifact_dir + "/validate.report.txt");
    for (const auto& c : report.checks) {
      rep.kv(c.name, std::string(c.pass ? "PASS" : "FAIL") + " | " + c.detail);
    }
  }
  return report;
}

}  // namespace gfbsde
