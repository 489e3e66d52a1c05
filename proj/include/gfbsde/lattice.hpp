#pragma once

#include <functional>
#include <vector>

#include "gfbsde/expr.hpp"
#include "gfbsde/g_function.hpp"

namespace gfbsde {

/**
 * Recombining trinomial lattice value function for terminal functionals of
 * G-Brownian motion. Level k holds the 2k+1 reachable offsets
 * {-k*dx, ..., +k*dx}; the spacing dx = sigma_hi * sqrt(dt) pins the top
 * volatility's middle-node mass to zero, and every smaller gamma puts the
 * remainder on the middle node so transition masses stay in [0, 1].
 */
struct LatticeField {
  int steps = 0;
  double T = 0.0;
  double dt = 0.0;
  double dx = 0.0;
  std::vector<std::vector<double>> levels;  // levels[k][j], offset = (j - k) * dx

  double value(int k, int offset) const { return levels[static_cast<std::size_t>(k)]
                                              [static_cast<std::size_t>(offset + k)]; }
  double t_of(int k) const { return k * dt; }
  double x_of(int k, int offset) const {
    (void)k;  // every level shares the spacing
    return offset * dx;
  }
};

/// Per-node volatility choice: gamma(level k, spatial offset x).
using NodeScenario = std::function<double(int k, double x)>;

/// Backward G-expectation recursion for E[phi(B_T)] evaluated at the root.
/// The per-step sup over [sigma_lo^2, sigma_hi^2] reduces to the G-function
/// of the discrete second difference, exact by linearity in gamma.
/// Throws on invalid N or T; a non-finite terminal value (unbounded phi on
/// the reachable range) is a BlowUpError.
double g_expectation(const GParams& params, const ExprPtr& phi, double T, int N);

/// Full value function on all lattice nodes; value(k, j) is the
/// conditional G-expectation of phi(B_T) given B_{t_k} = j*dx.
LatticeField conditional_field(const GParams& params, const ExprPtr& phi, double T, int N);

/// Backward G-recursion from explicit terminal node values (2N+1 entries,
/// N inferred) with step dt; performs the identical update sequence as
/// conditional_field, so re-rooting a level slice reproduces the root
/// value bitwise.
double g_expectation_from_values(const GParams& params, const std::vector<double>& terminal,
                                 double dt);

/// Same recursion driven by a fixed per-node scenario instead of the sup.
/// Dominated by the G-value for any admissible scenario; equality holds
/// for the argmax scenario extracted from the G-recursion.
LatticeField scenario_field(const GParams& params, const ExprPtr& phi, double T, int N,
                            const NodeScenario& gamma);

/// The per-node maximizing volatility recorded while running the
/// G-recursion; feeding it back through scenario_field reproduces the
/// G-value bitwise.
struct ArgmaxScenario {
  LatticeField field;                          // the G-value function
  std::vector<std::vector<double>> gamma;      // gamma[k][j] for k < steps
  NodeScenario as_node_scenario() const;
};
ArgmaxScenario conditional_field_with_argmax(const GParams& params, const ExprPtr& phi, double T,
                                             int N);

}  // namespace gfbsde
