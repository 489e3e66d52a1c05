#include "gfbsde/mollifier.hpp"

#include <cmath>
#include <cstddef>

#include "gfbsde/errors.hpp"
#include "gfbsde/numerics.hpp"

namespace gfbsde {

namespace {

double unnormalized_bump(double x) {
  const double s = 1.0 - x * x;
  if (s <= 0.0) return 0.0;
  return std::exp(-1.0 / s);
}

}  // namespace

double kernel_c0() {
  static const double c0 = [] {
    const double mass = adaptive_simpson(unnormalized_bump, -1.0, 1.0, 1e-14);
    return 1.0 / mass;
  }();
  return c0;
}

double kernel_rho(double x) { return kernel_c0() * unnormalized_bump(x); }

double kernel_rho_n(double x, int n) { return n * kernel_rho(n * x); }

std::vector<double> mollify(std::span<const double> samples, double dx, int n) {
  if (n < 1) throw ConfigError("mollify: smoothing index n must be >= 1");
  if (!(dx > 0.0)) throw ConfigError("mollify: grid spacing must be positive");
  const double radius = 1.0 / n;
  if (dx > 0.25 * radius) {
    throw ConfigError("mollify: grid spacing " + std::to_string(dx) +
                      " too coarse for n=" + std::to_string(n) + " (need dx <= 1/(4n) = " +
                      std::to_string(0.25 * radius) + ")");
  }

  // Trapezoid weights over the kernel support; rho_n vanishes at the
  // endpoints so the plain sum is the trapezoid rule. Renormalized so the
  // discrete row has exactly unit mass.
  const auto half = static_cast<std::ptrdiff_t>(radius / dx);
  std::vector<double> weights(static_cast<std::size_t>(2 * half + 1));
  double mass = 0.0;
  for (std::ptrdiff_t m = -half; m <= half; ++m) {
    const double w = kernel_rho_n(static_cast<double>(m) * dx, n) * dx;
    weights[static_cast<std::size_t>(m + half)] = w;
    mass += w;
  }
  for (double& w : weights) w /= mass;

  const auto count = static_cast<std::ptrdiff_t>(samples.size());
  std::vector<double> out(samples.size());
  for (std::ptrdiff_t j = 0; j < count; ++j) {
    double acc = 0.0;
    for (std::ptrdiff_t m = -half; m <= half; ++m) {
      std::ptrdiff_t k = j - m;
      if (k < 0) k = 0;
      if (k >= count) k = count - 1;
      acc += weights[static_cast<std::size_t>(m + half)] * samples[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

}  // namespace gfbsde
