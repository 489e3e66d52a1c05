#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gfbsde/expr.hpp"

namespace gfbsde {

/// Uniform 1D sample table with linear interpolation and constant
/// extension outside the sampled range. Used for mollified terminal data.
struct Samples1D {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> values;

  double eval(double x) const {
    if (values.size() == 1) return values[0];
    const double s = (x - x0) / dx;
    if (s <= 0.0) return values.front();
    const double last = static_cast<double>(values.size() - 1);
    if (s >= last) return values.back();
    const auto j = static_cast<std::size_t>(s);
    const double theta = s - static_cast<double>(j);
    return (1.0 - theta) * values[j] + theta * values[j + 1];
  }
};

/**
 * Evaluable coefficient functions b, h, sigma (over t,x,y), f, g (over
 * t,x,y,z), terminal phi (over x), and the constants the standing
 * assumptions require: Lipschitz bound L, uniform bound M for sigma and
 * phi, ellipticity floor lambda, moment exponent beta > 2, horizon T.
 */
struct CoefficientBundle {
  ExprPtr b, h, sigma, f, g, phi;
  std::optional<Samples1D> phi_table;  // overrides phi when set

  double L = 1.0;
  double M = 1.5;
  double lambda = 0.5;
  double beta = 4.0;
  double T = 1.0;

  static CoefficientBundle from_sources(const std::string& b_src, const std::string& h_src,
                                        const std::string& sigma_src, const std::string& f_src,
                                        const std::string& g_src, const std::string& phi_src,
                                        double L, double M, double lambda, double beta, double T);

  void validate() const;

  double eval_b(double t, double x, double y) const { return b->eval({t, x, y, 0.0}); }
  double eval_h(double t, double x, double y) const { return h->eval({t, x, y, 0.0}); }
  double eval_sigma(double t, double x, double y) const { return sigma->eval({t, x, y, 0.0}); }
  double eval_f(double t, double x, double y, double z) const { return f->eval({t, x, y, z}); }
  double eval_g(double t, double x, double y, double z) const { return g->eval({t, x, y, z}); }
  double eval_phi(double x) const {
    return phi_table ? phi_table->eval(x) : phi->eval({0.0, x, 0.0, 0.0});
  }

  /// Copy with terminal data replaced by mollified samples of the current
  /// terminal on a uniform grid (count points from x0, spacing dx),
  /// smoothing index n.
  CoefficientBundle with_mollified_phi(double x0, double dx, int count, int n) const;

  /// Affine blend toward another bundle: each coefficient becomes
  /// c + eps*(c' - c), built at the expression level; constants take the
  /// pointwise max so assumption checks stay conservative. Initial points
  /// are blended by the caller.
  CoefficientBundle blend_toward(const CoefficientBundle& other, double eps) const;
};

/// Finite probe set over (t, x, y, z) used by verify_assumptions.
struct ProbeGrid {
  double t0 = 0.0, t1 = 1.0;
  int nt = 5;
  double x0 = -3.0, x1 = 3.0;
  int nx = 25;
  double y0 = -2.0, y1 = 2.0;
  int ny = 9;
  double z0 = -2.0, z1 = 2.0;
  int nz = 9;

  static ProbeGrid defaults(double T) {
    ProbeGrid p;
    p.t1 = T;
    return p;
  }
};

struct AssumptionClause {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = true;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionClause> clauses;
  bool all_pass() const {
    for (const auto& c : clauses)
      if (!c.pass) return false;
    return true;
  }
};

/// Sample the standing assumptions on the probe grid: per-coefficient
/// Lipschitz difference quotients against L, growth bounds, |sigma|,|phi|
/// against M, and the ellipticity floor sigma^2 >= lambda. Failures are
/// advisory (reported, not thrown); evaluation domain errors propagate
/// with probe coordinates.
AssumptionReport verify_assumptions(const CoefficientBundle& c, const ProbeGrid& probe,
                                    double tolerance);

}  // namespace gfbsde
