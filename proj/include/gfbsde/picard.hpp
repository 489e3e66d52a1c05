#pragma once

#include <utility>
#include <vector>

#include "gfbsde/coefficients.hpp"
#include "gfbsde/field.hpp"
#include "gfbsde/g_function.hpp"

namespace gfbsde {

struct PicardOptions {
  int max_iter = 60;
  double tol = 1e-9;        // outer sup-norm convergence threshold
  double inner_tol = 1e-12; // per-node (Y,Z) fixed point threshold
  int inner_max = 200;
  int min_iter = 0;         // force this many sweeps for ratio measurement
  int nt_override = 0;      // 0 = resolve from the stability bound
  double cfl_safety = 0.9;
};

struct IterationState {
  int iterations = 0;
  bool converged = false;
  std::vector<double> distances;  // d_i = sup |y_{i+1} - y_i|
  double ratio_median = 0.0;      // median of d_{i+1}/d_i
};

struct PicardResult {
  DecouplingField field;  // local time axis: level 0 is t_a, level nt is t_b
  IterationState state;
};

/**
 * Small-horizon contraction solve on [t_a, t_b]: iterate the map taking a
 * Markovian field y(t, x) to the value field of the backward equation
 * whose forward coefficients b, h, sigma are frozen at y. Each sweep is a
 * monotone lattice recursion with the per-step sup over volatilities; f
 * and g are implicit in (Y, Z) at each node, solved by damped iteration
 * to inner_tol. Coefficients are evaluated at absolute time.
 *
 * terminal holds phi values on the grid's nodes; initial_guess (optional)
 * is a spatial profile extended constant in time, default the terminal.
 *
 * Throws NonContractionError when sweep distances fail to contract for
 * five consecutive ratios (horizon too long; bisect).
 */
PicardResult picard_solve(const CoefficientBundle& c, const GParams& params, double t_a,
                          double t_b, const std::vector<double>& terminal, const Grid1D& grid,
                          const PicardOptions& opts = {},
                          const std::vector<double>* initial_guess = nullptr);

struct DeltaEstimate {
  double delta = 0.0;
  std::vector<std::pair<double, double>> trace;  // (horizon probed, measured ratio)
};

/// Bisection on the horizon length for the largest T <= T_max whose
/// measured contraction ratio over ten forced sweeps stays <= 1/2.
/// Deterministic; returns 0 with the probe trace if even the smallest
/// probe fails.
DeltaEstimate estimate_delta(const CoefficientBundle& c, const GParams& params, const Grid1D& grid,
                             double T_max);

struct StitchResult {
  DecouplingField field;                    // glued field on [0, T]
  int n_cells = 0;
  double cell_length = 0.0;
  double seam_gap = 0.0;                    // exactly 0: gluing is by assignment
  std::vector<IterationState> cell_states;  // backward order (last cell first)
};

/// Partition [0, T] into equal cells of length <= delta0 and solve
/// backward cell by cell, gluing each cell's first level into the next
/// cell's terminal data. Cells are strictly sequential; the glued field
/// has a uniform time step.
StitchResult stitch_solve(const CoefficientBundle& c, const GParams& params, double T,
                          double delta0, const Grid1D& grid, const PicardOptions& opts = {});

}  // namespace gfbsde
