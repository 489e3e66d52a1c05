#pragma once

#include "gfbsde/coefficients.hpp"
#include "gfbsde/field.hpp"
#include "gfbsde/g_function.hpp"

namespace gfbsde {

struct PdeMeta {
  double m0 = 0.0;            // sup |u| over the solved field
  double m_lip = 0.0;         // reported spatial Lipschitz constant
  double dt = 0.0;
  int nt = 0;
  double cfl_bound = 0.0;     // probed rate D/dx^2 + B/dx + 2 H D/dx
  double terminal_residual = 0.0;  // max |u(T,.) - phi| (zero by construction)
};

struct PdeOptions {
  double cfl_safety = 0.9;  // dt <= safety / bound when nt is auto
  double t_offset = 0.0;    // coefficients see t_offset + local time (sub-horizon solves)
};

/// Probed stability rate for the explicit scheme on this grid: the
/// largest effective diffusion D = sup sigma_hi^2 * sigma^2 over the grid
/// and a |u| <= m0_probe band, plus drift contributions from b and h.
double cfl_rate(const CoefficientBundle& c, const GParams& params, const Grid1D& grid,
                double m0_probe);

/**
 * Solve the fully nonlinear decoupling PDE
 *   u_t + u_x b + G(u_xx sigma^2 + 2 u_x h + 2 g) + f = 0,  u(T,.) = phi,
 * backward in time with the monotone explicit update; u_x and u_xx are
 * central differences at the known (later) level, boundary columns use
 * one-sided u_x with u_xx := 0, and f, g receive z = u_x sigma.
 *
 * grid.nt == 0 resolves the step count from the probed stability rate;
 * a user-pinned nt that violates it throws CflError. Non-finite values
 * abort with BlowUpError at the first offending (t, x).
 */
DecouplingField solve_pde(const CoefficientBundle& c, const GParams& params, const Grid1D& grid,
                          PdeMeta* meta = nullptr, const PdeOptions& opts = {});

}  // namespace gfbsde
