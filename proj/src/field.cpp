#include "gfbsde/field.hpp"

#include <algorithm>
#include <cmath>

namespace gfbsde {

DecouplingField::DecouplingField(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (grid_.nt < 1) throw ConfigError("DecouplingField: grid.nt must be resolved (>= 1)");
  const auto expected =
      static_cast<std::size_t>(grid_.nt + 1) * static_cast<std::size_t>(grid_.nx);
  if (values_.size() != expected) {
    throw ConfigError("DecouplingField: value array size mismatch");
  }
}

DecouplingField DecouplingField::sample(const Grid1D& grid,
                                        const std::function<double(double, double)>& u) {
  Grid1D g = grid;
  if (g.nt < 1) g.nt = 1;
  std::vector<double> vals(static_cast<std::size_t>(g.nt + 1) * static_cast<std::size_t>(g.nx));
  const double dt = g.T / g.nt;
  for (int k = 0; k <= g.nt; ++k) {
    for (int j = 0; j < g.nx; ++j) {
      vals[static_cast<std::size_t>(k) * static_cast<std::size_t>(g.nx) +
           static_cast<std::size_t>(j)] = u(k * dt, g.x_of(j));
    }
  }
  return DecouplingField(g, std::move(vals));
}

double DecouplingField::m0() const {
  double m = 0.0;
  for (const double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

double DecouplingField::lipschitz() const {
  const double dx = grid_.dx();
  double m = 0.0;
  for (int k = 0; k <= grid_.nt; ++k) {
    for (int j = 0; j + 1 < grid_.nx; ++j) {
      m = std::max(m, std::fabs(at(k, j + 1) - at(k, j)) / dx);
    }
  }
  return m;
}

double DecouplingField::second_difference_noise() const {
  const double dx = grid_.dx();
  const double inv_dx2 = 1.0 / (dx * dx);
  double m = 0.0;
  for (int k = 0; k <= grid_.nt; ++k) {
    double prev = 0.0;
    bool have_prev = false;
    for (int j = 1; j + 1 < grid_.nx; ++j) {
      const double uxx = (at(k, j + 1) - 2.0 * at(k, j) + at(k, j - 1)) * inv_dx2;
      if (have_prev) m = std::max(m, std::fabs(uxx - prev));
      prev = uxx;
      have_prev = true;
    }
  }
  return m;
}

double DecouplingField::column(int level, double x) const {
  const double dx = grid_.dx();
  const double s = (x - grid_.x_min) / dx;
  const double jf = std::floor(s);
  int j = static_cast<int>(jf);
  double theta = s - jf;
  // snap near-node queries to the node so symmetric stencils of exact
  // data stay exact
  if (theta < 1e-9) {
    theta = 0.0;
  } else if (theta > 1.0 - 1e-9) {
    theta = 0.0;
    ++j;
  }
  if (j < 0) {
    j = 0;
    theta = 0.0;
  }
  if (j > grid_.nx - 1) {
    j = grid_.nx - 1;
    theta = 0.0;
  }
  if (theta == 0.0) return at(level, j);
  return (1.0 - theta) * at(level, j) + theta * at(level, j + 1);
}

double DecouplingField::value(double t, double x) const {
  const double eps = 1e-12 * (1.0 + std::fabs(grid_.T) + std::fabs(grid_.x_max));
  if (t < -eps || t > grid_.T + eps || x < grid_.x_min - eps || x > grid_.x_max + eps) {
    throw HullError("field query (t=" + std::to_string(t) + ", x=" + std::to_string(x) +
                    ") outside hull");
  }
  const double tc = std::clamp(t, 0.0, grid_.T);
  const double xc = std::clamp(x, grid_.x_min, grid_.x_max);
  const double dt_ = dt();
  int k = static_cast<int>(tc / dt_);
  if (k > grid_.nt - 1) k = grid_.nt - 1;
  double w = tc / dt_ - k;
  if (w < 1e-9) w = 0.0;
  if (w > 1.0 - 1e-9) w = 1.0;
  if (w == 0.0) return column(k, xc);
  if (w == 1.0) return column(k + 1, xc);
  const double lo = column(k, xc);
  const double hi = column(k + 1, xc);
  return (1.0 - w) * lo + w * hi;
}

FieldDerivs DecouplingField::derivatives(double t, double x) const {
  const double eps = 1e-12 * (1.0 + std::fabs(grid_.T) + std::fabs(grid_.x_max));
  if (t < -eps || t > grid_.T + eps || x < grid_.x_min - eps || x > grid_.x_max + eps) {
    throw HullError("field query (t=" + std::to_string(t) + ", x=" + std::to_string(x) +
                    ") outside hull");
  }
  const double tc = std::clamp(t, 0.0, grid_.T);
  const double xc = std::clamp(x, grid_.x_min, grid_.x_max);
  const double dx = grid_.dx();
  const double dt_ = dt();
  int k = static_cast<int>(tc / dt_);
  if (k > grid_.nt - 1) k = grid_.nt - 1;
  double w = tc / dt_ - k;
  if (w < 1e-9) w = 0.0;
  if (w > 1.0 - 1e-9) w = 1.0;

  auto level_derivs = [&](int level) -> FieldDerivs {
    FieldDerivs d;
    d.u = column(level, xc);
    if (xc >= grid_.x_min + dx && xc <= grid_.x_max - dx) {
      const double up = column(level, xc + dx);
      const double dn = column(level, xc - dx);
      d.ux = (up - dn) / (2.0 * dx);
      d.uxx = (up - 2.0 * d.u + dn) / (dx * dx);
    } else if (xc < grid_.x_min + dx) {
      d.ux = (column(level, xc + dx) - d.u) / dx;
      d.uxx = 0.0;
    } else {
      d.ux = (d.u - column(level, xc - dx)) / dx;
      d.uxx = 0.0;
    }
    return d;
  };

  if (w == 0.0) return level_derivs(k);
  if (w == 1.0) return level_derivs(k + 1);
  const FieldDerivs lo = level_derivs(k);
  const FieldDerivs hi = level_derivs(k + 1);
  return {(1.0 - w) * lo.u + w * hi.u, (1.0 - w) * lo.ux + w * hi.ux,
          (1.0 - w) * lo.uxx + w * hi.uxx};
}

DecouplingField exp_transform(const DecouplingField& field, double L, TransformDirection dir) {
  const Grid1D& g = field.grid();
  std::vector<double> vals(field.values().size());
  const double dt = g.T / g.nt;
  for (int k = 0; k <= g.nt; ++k) {
    const double factor = std::exp((dir == TransformDirection::Forward ? -L : L) * (g.T - k * dt));
    for (int j = 0; j < g.nx; ++j) {
      vals[static_cast<std::size_t>(k) * static_cast<std::size_t>(g.nx) +
           static_cast<std::size_t>(j)] = factor * field.at(k, j);
    }
  }
  return DecouplingField(g, std::move(vals));
}

}  // namespace gfbsde
