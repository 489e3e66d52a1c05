#pragma once

#include <cmath>

#include "gfbsde/errors.hpp"

namespace gfbsde {

/**
 * Volatility uncertainty interval [sigma_lo, sigma_hi].
 *
 * Encodes the scenario set Gamma = [sigma_lo^2, sigma_hi^2] of
 * quadratic-variation densities. Non-degenerate: 0 < sigma_lo <= sigma_hi.
 */
struct GParams {
  double sigma_lo = 0.8;
  double sigma_hi = 1.2;

  void validate() const {
    if (!(sigma_lo > 0.0) || !(sigma_lo <= sigma_hi)) {
      throw ConfigError("GParams invariant violated: need 0 < sigma_lo <= sigma_hi, got sigma_lo=" +
                        std::to_string(sigma_lo) + " sigma_hi=" + std::to_string(sigma_hi));
    }
  }

  double gamma_lo() const { return sigma_lo * sigma_lo; }
  double gamma_hi() const { return sigma_hi * sigma_hi; }
};

/// G(a) = 1/2 sigma_hi^2 a+ - 1/2 sigma_lo^2 a-; equals sup over
/// gamma in [sigma_lo^2, sigma_hi^2] of 1/2 gamma a.
inline double g_eval(const GParams& p, double a) {
  const double apos = a > 0.0 ? a : 0.0;
  const double aneg = a < 0.0 ? -a : 0.0;
  return 0.5 * p.gamma_hi() * apos - 0.5 * p.gamma_lo() * aneg;
}

/// The gamma attaining the sup in g_eval. Tie at a = 0 resolves to
/// sigma_hi^2 so scenario extraction stays deterministic.
inline double g_argmax(const GParams& p, double a) {
  return a >= 0.0 ? p.gamma_hi() : p.gamma_lo();
}

}  // namespace gfbsde
