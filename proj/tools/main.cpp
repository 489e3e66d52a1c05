// gfbsde: numerical laboratory for fully coupled forward-backward SDEs
// driven by G-Brownian motion. Subcommands expose the G-expectation
// lattice, the fully nonlinear decoupling PDE, the four-step path
// construction, the small-horizon contraction and stitching solvers, the
// mollifier, the coefficient-dependence harness, and a `validate`
// meta-command running the full cross-check suite.
//
// Exit codes: 0 pass, 1 check failure, 2 usage/config error, 3 numerical
// blow-up.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfbsde/csv.hpp"
#include "gfbsde/dependence.hpp"
#include "gfbsde/lattice.hpp"
#include "gfbsde/mollifier.hpp"
#include "gfbsde/numerics.hpp"
#include "gfbsde/pde.hpp"
#include "gfbsde/picard.hpp"
#include "gfbsde/simulate.hpp"
#include "gfbsde/validate.hpp"

namespace {

using namespace gfbsde;

int cmd_gheat(const std::string& config_path, const std::string& phi_src, int n_steps,
              const std::string& out_path) {
  const RunConfig cfg = RunConfig::load(config_path);
  const ExprPtr phi = phi_src.empty() ? cfg.coefficients.phi : parse_bound(phi_src, VarMask::of_x(), "phi");
  const LatticeField lat = conditional_field(cfg.g, phi, cfg.coefficients.T, n_steps);
  if (!out_path.empty()) {
    CsvWriter csv(out_path, {"t", "x", "v"});
    for (int k = 0; k <= lat.steps; ++k) {
      for (int j = -k; j <= k; ++j) {
        csv.row({lat.t_of(k), lat.x_of(k, j), lat.value(k, j)});
      }
    }
  }
  std::cout << "v0 = " << format_g17(lat.value(0, 0)) << " (N = " << n_steps
            << ", dt = " << format_g17(lat.dt) << ", dx = " << format_g17(lat.dx) << ")\n";
  return 0;
}

int cmd_solve_pde(const std::string& config_path, const std::string& out_path, bool emit_meta) {
  const RunConfig cfg = RunConfig::load(config_path);
  PdeMeta meta;
  const DecouplingField u = solve_pde(cfg.coefficients, cfg.g, cfg.grid, &meta);
  if (!out_path.empty()) {
    CsvWriter csv(out_path, {"t", "x", "u", "u_x", "u_xx"});
    for (int k = 0; k <= u.grid().nt; ++k) {
      for (int j = 0; j < u.grid().nx; ++j) {
        const FieldDerivs d = u.derivatives(u.t_of(k), u.grid().x_of(j));
        csv.row({u.t_of(k), u.grid().x_of(j), d.u, d.ux, d.uxx});
      }
    }
    if (emit_meta) {
      ReportWriter rep(out_path + ".meta.txt");
      rep.kv("m0", meta.m0);
      rep.kv("m_lip", meta.m_lip);
      rep.kv("cfl_dt", meta.dt);
      rep.kv("nt", static_cast<double>(meta.nt));
      rep.kv("cfl_rate", meta.cfl_bound);
      rep.kv("terminal_residual", meta.terminal_residual);
    }
  }
  std::cout << "u(0,0) = " << format_g17(u.value(0.0, 0.0)) << " (nt = " << meta.nt
            << ", m0 = " << format_g17(meta.m0) << ", M_lip = " << format_g17(meta.m_lip) << ")\n";
  return 0;
}

VolatilityScenario parse_scenario(const std::string& spec, const GParams& params) {
  if (spec == "worst") return VolatilityScenario::worst_case();
  if (spec.rfind("const:", 0) == 0) {
    return VolatilityScenario::constant(std::stod(spec.substr(6)));
  }
  if (spec.rfind("file:", 0) == 0) {
    const auto rows = read_xy_csv(spec.substr(5));
    std::vector<double> breaks, values;
    for (const auto& [t, gamma] : rows) {
      breaks.push_back(t);
      values.push_back(gamma);
    }
    return VolatilityScenario::piecewise(std::move(breaks), std::move(values));
  }
  throw ConfigError("unknown scenario spec \"" + spec + "\" (use worst | const:<g> | file:<csv>)");
  (void)params;
}

int cmd_simulate(const std::string& config_path, const std::string& scenario_spec, int n_paths,
                 int n_steps, std::uint64_t seed, bool has_seed, const std::string& out_path,
                 bool gaussian) {
  const RunConfig cfg = RunConfig::load(config_path);
  const int paths = n_paths > 0 ? n_paths : cfg.n_paths;
  const int steps = n_steps > 0 ? n_steps : cfg.n_steps;
  const std::uint64_t master = has_seed ? seed : cfg.seed;

  const DecouplingField u = solve_pde(cfg.coefficients, cfg.g, cfg.grid);
  const VolatilityScenario scenario = parse_scenario(scenario_spec, cfg.g);
  SimulateOptions opts;
  opts.x0 = cfg.x0;
  opts.gaussian_increments = gaussian;
  const PathSet set = simulate(cfg.coefficients, cfg.g, u, scenario, paths, steps, master, opts);

  if (!out_path.empty()) {
    CsvWriter csv(out_path, {"path_id", "t", "X", "Y", "Z", "K"});
    for (std::size_t pid = 0; pid < set.paths.size(); ++pid) {
      const auto& p = set.paths[pid];
      for (std::size_t k = 0; k < set.times.size(); ++k) {
        csv.row({static_cast<double>(pid), set.times[k], p.x[k], p.y[k], p.z[k], p.k[k]});
      }
    }
  }
  const SolutionReport rep = check_solution(cfg.coefficients, cfg.g, u, set);
  std::cout << "paths = " << paths << " steps = " << steps << " scenario = "
            << scenario.describe() << "\n"
            << "backward residual max = " << format_g17(rep.backward_residual_max)
            << " mean = " << format_g17(rep.backward_residual_mean) << "\n"
            << "K increment max = " << format_g17(rep.k_increment_max)
            << " (eps_fd = " << format_g17(rep.eps_fd) << ")\n"
            << "continuity statistic = " << format_g17(rep.continuity_stat)
            << " exited = " << set.n_exited() << "\n";
  return 0;
}

int cmd_picard(const std::string& config_path, const std::string& horizon, double tol,
               const std::string& out_path) {
  const RunConfig cfg = RunConfig::load(config_path);
  double t_a = 0.0, t_b = cfg.coefficients.T;
  if (!horizon.empty()) {
    const auto comma = horizon.find(',');
    if (comma == std::string::npos) throw ConfigError("--horizon expects a,b");
    t_a = std::stod(horizon.substr(0, comma));
    t_b = std::stod(horizon.substr(comma + 1));
  }
  std::vector<double> terminal(static_cast<std::size_t>(cfg.grid.nx));
  for (int j = 0; j < cfg.grid.nx; ++j) {
    terminal[static_cast<std::size_t>(j)] = cfg.coefficients.eval_phi(cfg.grid.x_of(j));
  }
  PicardOptions opts;
  opts.tol = tol;
  const PicardResult r = picard_solve(cfg.coefficients, cfg.g, t_a, t_b, terminal, cfg.grid, opts);

  if (!out_path.empty()) {
    CsvWriter csv(out_path, {"t", "x", "u"});
    for (int k = 0; k <= r.field.grid().nt; ++k) {
      for (int j = 0; j < r.field.grid().nx; ++j) {
        csv.row({t_a + k * r.field.dt(), r.field.grid().x_of(j), r.field.at(k, j)});
      }
    }
    ReportWriter rep(out_path + ".report.txt");
    rep.kv("iterations", static_cast<double>(r.state.iterations));
    rep.kv("converged", r.state.converged ? "true" : "false");
    rep.kv("ratio_median", r.state.ratio_median);
    for (std::size_t i = 0; i < r.state.distances.size(); ++i) {
      rep.kv("distance_" + std::to_string(i), r.state.distances[i]);
    }
  }
  std::cout << "iterations = " << r.state.iterations << " converged = "
            << (r.state.converged ? "yes" : "no")
            << " ratio = " << format_g17(r.state.ratio_median)
            << " u(t_a,0) = " << format_g17(r.field.value(0.0, 0.0)) << "\n";
  return r.state.converged ? 0 : 1;
}

int cmd_stitch(const std::string& config_path, double delta0, const std::string& out_path) {
  const RunConfig cfg = RunConfig::load(config_path);
  const StitchResult st = stitch_solve(cfg.coefficients, cfg.g, cfg.coefficients.T, delta0, cfg.grid);
  if (!out_path.empty()) {
    CsvWriter csv(out_path, {"t", "x", "u"});
    for (int k = 0; k <= st.field.grid().nt; ++k) {
      for (int j = 0; j < st.field.grid().nx; ++j) {
        csv.row({st.field.t_of(k), st.field.grid().x_of(j), st.field.at(k, j)});
      }
    }
    ReportWriter rep(out_path + ".report.txt");
    rep.kv("cells", static_cast<double>(st.n_cells));
    rep.kv("cell_length", st.cell_length);
    rep.kv("seam_gap", st.seam_gap);
    for (std::size_t i = 0; i < st.cell_states.size(); ++i) {
      rep.kv("cell_" + std::to_string(i) + "_iterations",
             static_cast<double>(st.cell_states[i].iterations));
      rep.kv("cell_" + std::to_string(i) + "_ratio", st.cell_states[i].ratio_median);
    }
  }
  std::cout << "cells = " << st.n_cells << " seam_gap = " << format_g17(st.seam_gap)
            << " u(0,0) = " << format_g17(st.field.value(0.0, 0.0)) << "\n";
  return 0;
}

int cmd_mollify(const std::string& in_path, int n, const std::string& out_path) {
  const auto rows = read_xy_csv(in_path);
  if (rows.size() < 2) throw ConfigError("mollify: need at least two samples");
  std::vector<double> samples;
  samples.reserve(rows.size());
  const double dx = rows[1].first - rows[0].first;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && std::fabs(rows[i].first - rows[i - 1].first - dx) > 1e-9 * (1.0 + std::fabs(dx))) {
      throw ConfigError("mollify: input grid must be uniform");
    }
    samples.push_back(rows[i].second);
  }
  const std::vector<double> smoothed = mollify(samples, dx, n);
  CsvWriter csv(out_path, {"x", "value"});
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    csv.row({rows[i].first, smoothed[i]});
  }
  std::cout << "smoothed " << samples.size() << " samples with n = " << n << "\n";
  return 0;
}

int cmd_perturb(const std::string& config_path, const std::string& config2_path, double alpha,
                const std::string& ladder_spec, const std::string& out_path) {
  const RunConfig cfg = RunConfig::load(config_path);
  const RunConfig cfg2 = RunConfig::load(config2_path);

  std::vector<double> ladder;
  std::string item;
  std::istringstream ls(ladder_spec);
  while (std::getline(ls, item, ',')) ladder.push_back(std::stod(item));
  if (ladder.empty()) throw ConfigError("--ladder expects a comma-separated list");

  DependenceConfig dcfg;
  dcfg.alpha = alpha;
  dcfg.x0 = cfg.x0;
  dcfg.x0_prime = cfg2.x0;
  dcfg.n_paths = cfg.n_paths;
  dcfg.n_steps = cfg.n_steps;
  dcfg.seed = cfg.seed;

  const LadderReport lr =
      dependence_check(cfg.coefficients, cfg2.coefficients, cfg.g, cfg.grid, dcfg, ladder);
  if (!out_path.empty()) {
    CsvWriter csv(out_path, {"eps", "lhs_x", "lhs_y", "lhs_z", "lhs_k", "lhs", "i0", "ialpha",
                             "ratio"});
    for (const auto& pt : lr.points) {
      csv.row({pt.eps, pt.report.lhs_x, pt.report.lhs_y, pt.report.lhs_z, pt.report.lhs_k,
               pt.report.lhs_total, pt.report.i0, pt.report.ialpha, pt.report.ratio});
    }
  }
  for (const auto& pt : lr.points) {
    std::cout << "eps = " << format_g17(pt.eps) << " LHS = " << format_g17(pt.report.lhs_total)
              << " ratio = " << format_g17(pt.report.ratio)
              << (pt.report.exact_match ? " (exact match)" : "") << "\n";
  }
  std::cout << "lhs decreasing = " << (lr.lhs_strictly_decreasing ? "yes" : "no")
            << " ratio spread = " << format_g17(lr.ratio_spread) << "\n";
  return 0;
}

int cmd_validate(const std::string& config_path, const std::string& out_dir) {
  const RunConfig cfg = RunConfig::load(config_path);
  const ValidationReport report = run_validation(cfg, out_dir);
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
  }
  std::cout << (report.all_pass() ? "validate: all checks passed\n"
                                  : "validate: CHECK FAILURES\n");
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for FBSDEs driven by G-Brownian motion"};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "worker cap for path-parallel loops")->capture_default_str();

  std::string config_path, config2_path, out_path, out_dir, horizon, scenario = "worst";
  std::string phi_src, in_path, ladder = "0.2,0.1,0.05,0.025";
  int n_steps = 200, n_paths = 0, moll_n = 10;
  double tol = 1e-8, delta0 = 0.1, alpha = 0.5;
  std::uint64_t seed = 0;
  bool emit_meta = false, gaussian = false;

  auto* gheat = app.add_subcommand("gheat", "lattice G-expectation of a terminal functional");
  gheat->add_option("--config", config_path, "config file")->required();
  gheat->add_option("--phi", phi_src, "terminal expression over x (default: config phi)");
  gheat->add_option("--steps", n_steps, "lattice steps")->capture_default_str();
  gheat->add_option("--out", out_path, "CSV of (t,x,v) triples");

  auto* pde = app.add_subcommand("solve-pde", "solve the fully nonlinear decoupling PDE");
  pde->add_option("--config", config_path, "config file")->required();
  pde->add_option("--out", out_path, "CSV of (t,x,u,u_x,u_xx) rows");
  pde->add_flag("--emit-meta", emit_meta, "write a summary sidecar next to --out");

  auto* sim = app.add_subcommand("simulate", "simulate (X,Y,Z,K) paths under a scenario");
  sim->add_option("--config", config_path, "config file")->required();
  sim->add_option("--scenario", scenario, "worst | const:<gamma> | file:<csv>")
      ->capture_default_str();
  sim->add_option("--paths", n_paths, "path count (default: config)");
  sim->add_option("--steps", n_steps, "time steps")->capture_default_str();
  auto* seed_opt = sim->add_option("--seed", seed, "master seed (default: config)");
  sim->add_option("--out", out_path, "CSV of (path_id,t,X,Y,Z,K)");
  sim->add_flag("--gaussian", gaussian, "gaussian increments instead of Bernoulli");

  auto* pic = app.add_subcommand("picard", "small-horizon contraction solve");
  pic->add_option("--config", config_path, "config file")->required();
  pic->add_option("--horizon", horizon, "a,b (default: 0,T)");
  pic->add_option("--tol", tol, "outer sup-norm tolerance")->capture_default_str();
  pic->add_option("--out", out_path, "CSV of (t,x,u); sidecar .report.txt");

  auto* sti = app.add_subcommand("stitch", "partition-stitched solve on [0,T]");
  sti->add_option("--config", config_path, "config file")->required();
  sti->add_option("--delta0", delta0, "maximum cell length")->capture_default_str();
  sti->add_option("--out", out_path, "CSV of (t,x,u); sidecar .report.txt");

  auto* mol = app.add_subcommand("mollify", "smooth uniform samples with the bump kernel");
  mol->add_option("--in", in_path, "input CSV (x,value)")->required();
  mol->add_option("--n", moll_n, "smoothing index")->capture_default_str();
  mol->add_option("--out", out_path, "output CSV")->required();

  auto* per = app.add_subcommand("perturb", "continuous-dependence ladder for a bundle pair");
  per->add_option("--config", config_path, "base config")->required();
  per->add_option("--config2", config2_path, "perturbed config")->required();
  per->add_option("--alpha", alpha, "exponent (needs 2+alpha < beta)")->capture_default_str();
  per->add_option("--ladder", ladder, "comma-separated epsilons")->capture_default_str();
  per->add_option("--out", out_path, "CSV of ladder results");

  auto* val = app.add_subcommand("validate", "run the full cross-check suite");
  val->add_option("--config", config_path, "config file")->required();
  val->add_option("--out-dir", out_dir, "directory for deterministic artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  gfbsde::set_worker_count(threads);

  try {
    if (gheat->parsed()) return cmd_gheat(config_path, phi_src, n_steps, out_path);
    if (pde->parsed()) return cmd_solve_pde(config_path, out_path, emit_meta);
    if (sim->parsed()) {
      return cmd_simulate(config_path, scenario, n_paths, n_steps, seed, seed_opt->count() > 0,
                          out_path, gaussian);
    }
    if (pic->parsed()) return cmd_picard(config_path, horizon, tol, out_path);
    if (sti->parsed()) return cmd_stitch(config_path, delta0, out_path);
    if (mol->parsed()) return cmd_mollify(in_path, moll_n, out_path);
    if (per->parsed()) return cmd_perturb(config_path, config2_path, alpha, ladder, out_path);
    if (val->parsed()) return cmd_validate(config_path, out_dir);
  } catch (const gfbsde::BlowUpError& e) {
    std::cerr << "numerical blow-up: " << e.what() << "\n";
    return 3;
  } catch (const gfbsde::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gfbsde::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gfbsde::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
