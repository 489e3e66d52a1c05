#pragma once

#include <functional>
#include <vector>

#include "gfbsde/errors.hpp"

namespace gfbsde {

/// Uniform space-time grid. nt = 0 means "choose the time resolution from
/// the stability bound at solve time".
struct Grid1D {
  double x_min = -6.0;
  double x_max = 6.0;
  int nx = 241;
  double T = 1.0;
  int nt = 0;

  double dx() const { return (x_max - x_min) / (nx - 1); }
  double x_of(int j) const { return x_min + j * dx(); }

  void validate() const {
    if (!(x_min < x_max)) throw ConfigError("Grid1D: need x_min < x_max");
    if (nx < 3) throw ConfigError("Grid1D: need nx >= 3");
    if (!(T > 0.0)) throw ConfigError("Grid1D: need T > 0");
    if (nt < 0) throw ConfigError("Grid1D: need nt >= 0");
  }
};

struct FieldDerivs {
  double u = 0.0;
  double ux = 0.0;
  double uxx = 0.0;
};

/**
 * Grid-sampled decoupling field u(t, x) on a uniform grid, time level 0 at
 * t = 0 and level nt at t = T, with interpolating accessors for u and its
 * first/second spatial difference quotients.
 */
class DecouplingField {
 public:
  /// Takes a grid with resolved nt >= 1 and (nt+1)*nx values, level-major.
  DecouplingField(Grid1D grid, std::vector<double> values);

  /// Sample an analytic function onto the grid.
  static DecouplingField sample(const Grid1D& grid, const std::function<double(double, double)>& u);

  const Grid1D& grid() const { return grid_; }
  double dt() const { return grid_.T / grid_.nt; }
  double t_of(int k) const { return k * dt(); }

  double at(int k, int j) const {
    return values_[static_cast<std::size_t>(k) * static_cast<std::size_t>(grid_.nx) +
                   static_cast<std::size_t>(j)];
  }
  double& at(int k, int j) {
    return values_[static_cast<std::size_t>(k) * static_cast<std::size_t>(grid_.nx) +
                   static_cast<std::size_t>(j)];
  }
  const std::vector<double>& values() const { return values_; }

  /// Sup norm of the field (the a-posteriori bound M0).
  double m0() const;

  /// Largest adjacent-node difference quotient over all levels (the
  /// reported spatial Lipschitz constant).
  double lipschitz() const;

  /// Largest jump between adjacent-node second difference quotients;
  /// feeds the epsilon_fd tolerance of the path-level K checks.
  double second_difference_noise() const;

  /// u by bilinear interpolation; ux, uxx by differencing interpolated
  /// columns at the bracketing time levels, then linear in t. Within one
  /// dx of the spatial boundary, ux is one-sided and uxx is zero,
  /// matching the solver's boundary treatment. Throws HullError outside
  /// [0, T] x [x_min, x_max].
  FieldDerivs derivatives(double t, double x) const;

  /// Interpolated value only (cheaper than derivatives()).
  double value(double t, double x) const;

  bool contains(double x) const { return x >= grid_.x_min && x <= grid_.x_max; }

 private:
  double column(int level, double x) const;  // linear interpolation in x
  Grid1D grid_;
  std::vector<double> values_;
};

/// Multiply each time level by exp(-L(T-t)) (forward) or exp(+L(T-t))
/// (inverse); inverse of forward is the identity to round-off.
enum class TransformDirection { Forward, Inverse };
DecouplingField exp_transform(const DecouplingField& field, double L, TransformDirection dir);

}  // namespace gfbsde
