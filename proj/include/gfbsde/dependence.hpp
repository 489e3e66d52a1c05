#pragma once

#include <cstdint>
#include <vector>

#include "gfbsde/coefficients.hpp"
#include "gfbsde/field.hpp"
#include "gfbsde/g_function.hpp"
#include "gfbsde/picard.hpp"

namespace gfbsde {

struct DependenceConfig {
  double alpha = 0.5;   // exponent, needs 2 < 2+alpha < min(beta, beta')
  double x0 = 0.0;
  double x0_prime = 0.0;
  int n_paths = 2000;
  int n_steps = 50;
  std::uint64_t seed = 42;
  int n_random_scenarios = 8;

  void validate(const CoefficientBundle& c, const CoefficientBundle& cp) const {
    if (!(alpha > 0.0) || !(2.0 + alpha < c.beta) || !(2.0 + alpha < cp.beta)) {
      throw ConfigError("dependence: need 2 < 2+alpha < min(beta, beta')");
    }
    if (n_paths < 1 || n_steps < 1) throw ConfigError("dependence: need paths and steps >= 1");
  }
};

/**
 * Monte Carlo estimate of the coefficient-difference functional
 *   I_alpha = |x0-x0'|^{2+a} + E int (|b^|+|h^|+|sigma^|)^{2+a} ds
 *           + E |phi^(X_T)|^{2+a} + E int (|f^|+|g^|)^{2+a} ds
 * along paths of the c-system, with E realized as the max over the finite
 * scenario family {gamma*, sigma_lo^2, sigma_hi^2, 8 seeded random
 * scenarios} and the differences evaluated pointwise on paths.
 */
double i_alpha(const CoefficientBundle& c, const CoefficientBundle& cp, const GParams& params,
               const DecouplingField& field_c, const DependenceConfig& cfg);

struct PairReport {
  double lhs_x = 0.0;   // E sup |X^|^2
  double lhs_y = 0.0;   // E sup |Y^|^2
  double lhs_z = 0.0;   // E int |Z^|^2 dt
  double lhs_k = 0.0;   // E |K^_T|^2
  double lhs_total = 0.0;
  double i0 = 0.0;
  double ialpha = 0.0;
  double bound_shape = 0.0;  // I0 + Ia + Ia^{1/(2+a)}
  double ratio = 0.0;        // lhs_total / bound_shape (0 when exact match)
  bool exact_match = false;  // identical systems: LHS and I both exactly 0
};

/// Solve both systems on [0, T] by the contraction map, simulate them
/// under the shared scenario family with shared noise (policy scenarios
/// are realized on the c-run and replayed on the c'-run), and report the
/// stability metrics against the bound shape.
PairReport dependence_pair(const CoefficientBundle& c, const CoefficientBundle& cp,
                           const GParams& params, const Grid1D& grid, const DependenceConfig& cfg);

struct LadderPoint {
  double eps = 0.0;
  PairReport report;
};

struct LadderReport {
  std::vector<LadderPoint> points;
  bool lhs_strictly_decreasing = false;
  double ratio_spread = 0.0;  // max ratio / min ratio across the ladder
};

/// Run dependence_pair along the shrinking perturbation ladder
/// c_eps = c + eps (c' - c), x0_eps = x0 + eps (x0' - x0).
LadderReport dependence_check(const CoefficientBundle& c, const CoefficientBundle& cp,
                              const GParams& params, const Grid1D& grid,
                              const DependenceConfig& cfg, const std::vector<double>& ladder);

}  // namespace gfbsde
