#pragma once

#include <span>
#include <vector>

namespace gfbsde {

/// Normalization constant c0 of the bump rho(x) = c0 * exp(-1/(1-x^2)) on
/// (-1, 1), computed once by adaptive quadrature so that the kernel has
/// unit mass, then cached.
double kernel_c0();

/// The unit-mass bump rho; zero outside (-1, 1).
double kernel_rho(double x);

/// The rescaled kernel rho_n(x) = n * rho(n x), support (-1/n, 1/n).
double kernel_rho_n(double x, int n);

/// Discrete convolution of uniformly spaced samples with rho_n by the
/// trapezoid rule, with the weight row renormalized to exact unit mass.
/// Edges use constant extension of the samples. Requires dx <= 1/(4n) so
/// the kernel support spans at least 8 sample intervals.
std::vector<double> mollify(std::span<const double> samples, double dx, int n);

}  // namespace gfbsde
