#include "gfbsde/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "gfbsde/numerics.hpp"
#include "gfbsde/rng.hpp"

namespace gfbsde {

VolatilityScenario VolatilityScenario::constant(double gamma) {
  VolatilityScenario s;
  s.breakpoints_ = {0.0};
  s.values_ = {gamma};
  return s;
}

VolatilityScenario VolatilityScenario::piecewise(std::vector<double> breakpoints,
                                                 std::vector<double> values) {
  if (breakpoints.empty() || breakpoints.size() != values.size()) {
    throw ConfigError("piecewise scenario: need matching non-empty breakpoints and values");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw ConfigError("piecewise scenario: breakpoints must be strictly increasing");
    }
  }
  VolatilityScenario s;
  s.breakpoints_ = std::move(breakpoints);
  s.values_ = std::move(values);
  return s;
}

VolatilityScenario VolatilityScenario::worst_case() {
  VolatilityScenario s;
  s.policy_ = true;
  return s;
}

double VolatilityScenario::value(double t) const {
  if (policy_) throw ConfigError("worst-case scenario has no time-only value");
  std::size_t i = 0;
  while (i + 1 < breakpoints_.size() && t >= breakpoints_[i + 1] - 1e-15) ++i;
  return values_[i];
}

void VolatilityScenario::validate(const GParams& params) const {
  if (policy_) return;
  for (const double g : values_) {
    if (g < params.gamma_lo() - 1e-12 || g > params.gamma_hi() + 1e-12) {
      throw ConfigError("scenario gamma " + std::to_string(g) +
                        " outside [sigma_lo^2, sigma_hi^2] = [" +
                        std::to_string(params.gamma_lo()) + ", " +
                        std::to_string(params.gamma_hi()) + "]");
    }
  }
}

std::string VolatilityScenario::describe() const {
  if (policy_) return "worst-case feedback policy";
  if (values_.size() == 1) return "constant gamma=" + std::to_string(values_[0]);
  return "piecewise gamma with " + std::to_string(values_.size()) + " pieces";
}

double scenario_argument(const CoefficientBundle& c, const DecouplingField& field, double t,
                         double x) {
  const FieldDerivs d = field.derivatives(t, x);
  const double sig = c.eval_sigma(t, x, d.u);
  const double z = d.ux * sig;
  return d.uxx * sig * sig + 2.0 * d.ux * c.eval_h(t, x, d.u) + 2.0 * c.eval_g(t, x, d.u, z);
}

double worst_case_gamma(const CoefficientBundle& c, const GParams& params,
                        const DecouplingField& field, double t, double x) {
  return g_argmax(params, scenario_argument(c, field, t, x));
}

PathSet simulate(const CoefficientBundle& c, const GParams& params, const DecouplingField& field,
                 const VolatilityScenario& scenario, int n_paths, int n_steps,
                 std::uint64_t master_seed, const SimulateOptions& opts) {
  params.validate();
  scenario.validate(params);
  if (n_paths < 1 || n_steps < 1) throw ConfigError("simulate: need n_paths >= 1, n_steps >= 1");
  const double T = field.grid().T;
  const double dt = T / n_steps;

  if (!scenario.is_policy()) {
    // the step grid must refine the scenario's breakpoints
    for (const double bp : scenario.breakpoints()) {
      if (bp <= 0.0) continue;
      const double steps = bp / dt;
      if (std::fabs(steps - std::round(steps)) > 1e-9) {
        throw ConfigError("scenario breakpoint t=" + std::to_string(bp) +
                          " does not lie on the step grid (dt=" + std::to_string(dt) + ")");
      }
    }
  }
  if (opts.replay_gamma && opts.replay_gamma->size() != static_cast<std::size_t>(n_paths)) {
    throw ConfigError("simulate: replay gamma set size does not match n_paths");
  }
  if (!field.contains(opts.x0)) {
    throw ConfigError("simulate: x0 outside field hull");
  }

  PathSet set;
  set.times.resize(static_cast<std::size_t>(n_steps + 1));
  for (int k = 0; k <= n_steps; ++k) set.times[static_cast<std::size_t>(k)] = k * dt;
  set.paths.resize(static_cast<std::size_t>(n_paths));

  parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t p) {
    PathQuadruple& path = set.paths[p];
    const std::uint64_t seed = Rng::stream_seed(master_seed, opts.seed_tag, p);
    path.seed = seed;
    Rng rng(seed);

    const auto n = static_cast<std::size_t>(n_steps);
    path.x.resize(n + 1);
    path.y.resize(n + 1);
    path.z.resize(n + 1);
    path.k.resize(n + 1);
    path.gamma.resize(n);
    path.xi.resize(n);

    path.x[0] = opts.x0;
    path.k[0] = 0.0;

    for (std::size_t k = 0; k <= n; ++k) {
      const double t = set.times[k];
      const double xk = path.x[k];
      const FieldDerivs d = field.derivatives(t, xk);
      const double yk = d.u;
      const double sig = c.eval_sigma(t, xk, yk);
      const double zk = d.ux * sig;
      path.y[k] = yk;
      path.z[k] = zk;
      if (k == n) break;

      const double gv = c.eval_g(t, xk, yk, zk);
      const double hv = c.eval_h(t, xk, yk);
      const double a = d.uxx * sig * sig + 2.0 * d.ux * hv + 2.0 * gv;
      const double gamma = opts.replay_gamma ? (*opts.replay_gamma)[p][k]
                           : scenario.is_policy() ? g_argmax(params, a)
                                                  : scenario.value(t);
      const double xi = opts.gaussian_increments ? rng.next_gaussian() : rng.next_sign();
      path.gamma[k] = gamma;
      path.xi[k] = xi;

      path.k[k + 1] = path.k[k] +
                      (0.5 * d.uxx * sig * sig + d.ux * hv + gv) * gamma * dt -
                      g_eval(params, a) * dt;

      const double x_next = xk + c.eval_b(t, xk, yk) * dt + hv * gamma * dt +
                            sig * std::sqrt(gamma * dt) * xi;
      if (!field.contains(x_next)) {
        // terminate and flag: extrapolated curvature would corrupt the
        // K invariants
        path.exited = true;
        path.exit_step = static_cast<int>(k) + 1;
        for (std::size_t r = k + 1; r <= n; ++r) {
          path.x[r] = xk;
          path.y[r] = yk;
          path.z[r] = zk;
          path.k[r] = path.k[k];
          if (r < n) {
            path.gamma[r] = gamma;
            path.xi[r] = 0.0;
          }
        }
        break;
      }
      path.x[k + 1] = x_next;
    }
  });
  return set;
}

SolutionReport check_solution(const CoefficientBundle& c, const GParams& params,
                              const DecouplingField& field, const PathSet& set) {
  SolutionReport rep;
  rep.eps_fd = 10.0 * field.second_difference_noise() *
               (set.times.size() > 1 ? set.times[1] - set.times[0] : 0.0);
  const std::size_t n_steps = set.times.size() - 1;
  const double dt = set.times[1] - set.times[0];

  std::vector<double> residuals;
  residuals.reserve(set.paths.size() * n_steps);

  for (const PathQuadruple& path : set.paths) {
    if (path.exited) continue;
    ++rep.paths_checked;
    for (std::size_t k = 0; k < n_steps; ++k) {
      const double t = set.times[k];
      const double xk = path.x[k], yk = path.y[k], zk = path.z[k];
      const double gamma = path.gamma[k];

      // tautology guard against code drift
      rep.y_identity_max =
          std::max(rep.y_identity_max, std::fabs(yk - field.derivatives(t, xk).u));

      // forward equation residual (recomputed Euler step)
      const double sig = c.eval_sigma(t, xk, yk);
      const double x_pred = xk + c.eval_b(t, xk, yk) * dt + c.eval_h(t, xk, yk) * gamma * dt +
                            sig * std::sqrt(gamma * dt) * path.xi[k];
      rep.forward_residual_max = std::max(rep.forward_residual_max, std::fabs(x_pred - path.x[k + 1]));

      // backward equation residual: dY = -f dt - g gamma dt + Z dB + dK
      const double db = std::sqrt(gamma * dt) * path.xi[k];
      const double dk = path.k[k + 1] - path.k[k];
      const double rhs = -c.eval_f(t, xk, yk, zk) * dt - c.eval_g(t, xk, yk, zk) * gamma * dt +
                         zk * db + dk;
      const double resid = std::fabs(path.y[k + 1] - yk - rhs);
      residuals.push_back(resid);
      rep.backward_residual_max = std::max(rep.backward_residual_max, resid);
      rep.k_increment_max = std::max(rep.k_increment_max, dk);
    }
    rep.terminal_gap_max =
        std::max(rep.terminal_gap_max, std::fabs(path.y[n_steps] - c.eval_phi(path.x[n_steps])));
  }
  if (!residuals.empty()) {
    rep.backward_residual_mean = pairwise_sum(residuals) / static_cast<double>(residuals.size());
  }

  // continuity statistic sup_{s<t} mean |X_s - X_t|^2 / (t - s) over a
  // decimated level set; recorded as a regression baseline
  const std::size_t max_levels = 40;
  const std::size_t stride = std::max<std::size_t>(1, n_steps / max_levels);
  std::vector<std::size_t> levels;
  for (std::size_t k = 0; k <= n_steps; k += stride) levels.push_back(k);
  if (levels.back() != n_steps) levels.push_back(n_steps);
  std::vector<double> sq(set.paths.size());
  for (std::size_t a = 0; a < levels.size(); ++a) {
    for (std::size_t b = a + 1; b < levels.size(); ++b) {
      const std::size_t ka = levels[a], kb = levels[b];
      std::size_t n_used = 0;
      for (const PathQuadruple& path : set.paths) {
        if (path.exited) continue;
        const double d = path.x[kb] - path.x[ka];
        sq[n_used++] = d * d;
      }
      if (n_used == 0) continue;
      const double mean =
          pairwise_sum(std::span(sq.data(), n_used)) / static_cast<double>(n_used);
      rep.continuity_stat =
          std::max(rep.continuity_stat, mean / (set.times[kb] - set.times[ka]));
    }
  }
  (void)params;
  return rep;
}

}  // namespace gfbsde
