#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfbsde/config.hpp"
#include "gfbsde/dependence.hpp"
#include "gfbsde/field.hpp"
#include "gfbsde/simulate.hpp"

namespace gfbsde {

// ---------------------------------------------------------------------------
// Canonical bundles used across the cross-check suite.

/// b = h = f = g = 0, sigma = 1, quadratic terminal x^2 (the canonical
/// heat-type moment test; terminal is unbounded, which the assumption
/// checker flags as advisory).
CoefficientBundle gheat_bundle(double T);

/// b = h = f = g = 0, sigma = 1, bounded Lipschitz terminal tanh(x).
CoefficientBundle tanh_bundle(double T);

/// Classical reduction (use with sigma_lo = sigma_hi = 1): f is chosen so
/// the exact solution is u*(t,x) = exp(-(T-t)) tanh(x).
CoefficientBundle manufactured_bundle(double T);
double manufactured_reference(double T, double t, double x);

/// Fully coupled smooth test bundle: y enters b, h, sigma; f and g
/// depend on (x, y, z); terminal tanh(x).
CoefficientBundle coupled_bundle(double T);

// ---------------------------------------------------------------------------
// Measurement routines shared by `validate` and the acceptance suite.

struct MomentErrors {
  double x2_error = 0.0;     // |value(x^2) - sigma_hi^2 T|
  double negx2_error = 0.0;  // |value(-x^2) + sigma_lo^2 T|
  double x_value = 0.0;      // value(x), zero exactly by symmetry
};
MomentErrors lattice_moment_errors(const GParams& params, double T, int N);

struct FkGap {
  double gap = 0.0;          // max over probe points |u_pde(0,x0) - lattice(x0)|
  double pde_at_zero = 0.0;
  double lattice_at_zero = 0.0;
};
FkGap feynman_kac_gap(const GParams& params, const Grid1D& grid, int lattice_n);

struct ManufacturedLevel {
  int nx = 0;
  double dx = 0.0;
  double dt = 0.0;
  double error = 0.0;  // max |u - u*| over all levels, |x| <= 3
};
std::vector<ManufacturedLevel> manufactured_errors(const Grid1D& base_grid,
                                                   const std::vector<int>& nx_levels, double T);

struct KInvariantStats {
  double max_increment = 0.0;  // largest K increment over all paths/steps
  double mean_kt = 0.0;
  double se_kt = 0.0;
  double eps_fd = 0.0;
  int paths_exited = 0;
};
KInvariantStats k_invariant_stats(const CoefficientBundle& c, const GParams& params,
                                  const DecouplingField& field, const VolatilityScenario& scenario,
                                  int n_paths, int n_steps, std::uint64_t seed);

/// Sup-norm gap between two fields sampled at t = 0 over a probe window.
double field_gap_at_zero(const DecouplingField& a, const DecouplingField& b, double x_lo,
                         double x_hi, int n_probe);

// ---------------------------------------------------------------------------
// The validate meta-command.

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Run the full cross-check suite against a configuration: G-function
/// properties, lattice moments, PDE-vs-lattice consistency, manufactured
/// solution recovery, path-level K invariants with the worst-case
/// scenario test, contraction-vs-PDE and stitching agreement, mollifier
/// convergence, and the dependence ladder. When artifact_dir is non-empty
/// the deterministic CSV artifacts are written there (reruns with the
/// same config and seed are byte-identical).
ValidationReport run_validation(const RunConfig& config, const std::string& artifact_dir = "");

}  // namespace gfbsde
