#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gfbsde/coefficients.hpp"
#include "gfbsde/field.hpp"
#include "gfbsde/g_function.hpp"

namespace gfbsde {

/**
 * A volatility scenario: one admissible quadratic-variation density
 * gamma_t in [sigma_lo^2, sigma_hi^2]. Either piecewise constant in time,
 * or the worst-case state-feedback policy gamma*(t,x) resolved against the
 * decoupling field during simulation.
 */
class VolatilityScenario {
 public:
  static VolatilityScenario constant(double gamma);
  static VolatilityScenario piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static VolatilityScenario worst_case();

  bool is_policy() const { return policy_; }
  /// gamma(t) for non-policy scenarios.
  double value(double t) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  void validate(const GParams& params) const;
  std::string describe() const;

 private:
  bool policy_ = false;
  std::vector<double> breakpoints_;  // ascending, gamma = values_[i] on [b_i, b_{i+1})
  std::vector<double> values_;
};

/// The argument of G along the field: A(t,x) = uxx sigma^2 + 2 ux h + 2 g,
/// with y = u(t,x) and z = ux sigma. The worst-case policy is
/// gamma*(t,x) = g_argmax(A(t,x)).
double scenario_argument(const CoefficientBundle& c, const DecouplingField& field, double t,
                         double x);
double worst_case_gamma(const CoefficientBundle& c, const GParams& params,
                        const DecouplingField& field, double t, double x);

/// One simulated path of the quadruple (X, Y, Z, K) plus the driving
/// noise and realized scenario, K_0 = 0. Paths that leave the field hull
/// are frozen at the exit step and flagged.
struct PathQuadruple {
  std::vector<double> x, y, z, k;
  std::vector<double> gamma;  // per step
  std::vector<double> xi;     // per step, +-1 (or gaussian draws)
  std::uint64_t seed = 0;
  bool exited = false;
  int exit_step = -1;
};

struct PathSet {
  std::vector<double> times;
  std::vector<PathQuadruple> paths;
  int n_exited() const {
    int n = 0;
    for (const auto& p : paths) n += p.exited ? 1 : 0;
    return n;
  }
};

struct SimulateOptions {
  double x0 = 0.0;
  bool gaussian_increments = false;  // robustness flag; default Bernoulli +-1
  std::string seed_tag = "simulate";
  /// Replay a fixed per-path gamma sequence (used for coupled pair runs).
  const std::vector<std::vector<double>>* replay_gamma = nullptr;
};

/**
 * Euler recursion under a scenario:
 *   X_{k+1} = X_k + b dt + h gamma_k dt + sigma sqrt(gamma_k dt) xi_k,
 * with Y_k = u(t_k, X_k), Z_k = ux(t_k, X_k) sigma, and
 *   K_{k+1} = K_k + [1/2 uxx sigma^2 + ux h + g] gamma_k dt - G(A) dt,
 * all coefficients evaluated at (t_k, X_k, Y_k, Z_k). Per-path seeds
 * derive from the master seed via stream_seed(seed_tag, path index).
 */
PathSet simulate(const CoefficientBundle& c, const GParams& params, const DecouplingField& field,
                 const VolatilityScenario& scenario, int n_paths, int n_steps,
                 std::uint64_t master_seed, const SimulateOptions& opts = {});

/// Residual report for a simulated ensemble against the backward equation.
struct SolutionReport {
  double backward_residual_max = 0.0;
  double backward_residual_mean = 0.0;
  double forward_residual_max = 0.0;   // recomputed Euler step; zero by construction
  double y_identity_max = 0.0;         // max |Y_k - u(t_k, X_k)|, tautology guard
  double k_increment_max = 0.0;        // largest K increment observed
  double eps_fd = 0.0;                 // 10 * field second-difference noise * dt
  double terminal_gap_max = 0.0;       // max |Y_N - phi(X_N)|
  double continuity_stat = 0.0;        // sup over (s,t) of mean |X_s - X_t|^2 / |t-s|
  int paths_checked = 0;
};

SolutionReport check_solution(const CoefficientBundle& c, const GParams& params,
                              const DecouplingField& field, const PathSet& paths);

}  // namespace gfbsde
