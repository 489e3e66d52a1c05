#include "gfbsde/pde.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gfbsde {

double cfl_rate(const CoefficientBundle& c, const GParams& params, const Grid1D& grid,
                double m0_probe) {
  const double dx = grid.dx();
  double sig2_max = 0.0, b_max = 0.0, h_max = 0.0;
  const int nt_probe = 5, ny_probe = 5;
  for (int it = 0; it < nt_probe; ++it) {
    const double t = grid.T * it / (nt_probe - 1);
    for (int j = 0; j < grid.nx; ++j) {
      const double x = grid.x_of(j);
      for (int iy = 0; iy < ny_probe; ++iy) {
        const double y = -m0_probe + 2.0 * m0_probe * iy / (ny_probe - 1);
        sig2_max = std::max(sig2_max, std::pow(c.eval_sigma(t, x, y), 2));
        b_max = std::max(b_max, std::fabs(c.eval_b(t, x, y)));
        h_max = std::max(h_max, std::fabs(c.eval_h(t, x, y)));
      }
    }
  }
  const double diffusion = params.gamma_hi() * sig2_max;
  return diffusion / (dx * dx) + b_max / dx + 2.0 * h_max * diffusion / dx;
}

namespace {

double probe_band(const CoefficientBundle& c, const Grid1D& grid) {
  double phi_max = 0.0;
  for (int j = 0; j < grid.nx; ++j) {
    phi_max = std::max(phi_max, std::fabs(c.eval_phi(grid.x_of(j))));
  }
  return 2.0 * phi_max + 1.0;
}

}  // namespace

DecouplingField solve_pde(const CoefficientBundle& c, const GParams& params, const Grid1D& grid,
                          PdeMeta* meta, const PdeOptions& opts) {
  params.validate();
  grid.validate();

  const double dx = grid.dx();
  Grid1D probe = grid;
  probe.T = opts.t_offset + grid.T;  // probe coefficients over absolute time
  const double rate = cfl_rate(c, params, probe, probe_band(c, grid));

  Grid1D g = grid;
  if (g.nt == 0) {
    g.nt = std::max(1, static_cast<int>(std::ceil(g.T * rate / opts.cfl_safety)));
  }
  const double dt = g.T / g.nt;
  if (dt * rate > 1.0) {
    throw CflError("CFL violated: dt * (D/dx^2 + |b|/dx + 2|h|D/dx) = " +
                   std::to_string(dt * rate) + " > 1 (dt=" + std::to_string(dt) +
                   ", rate=" + std::to_string(rate) + "); increase nt or coarsen dx");
  }

  const int nx = g.nx;
  std::vector<double> values(static_cast<std::size_t>(g.nt + 1) * static_cast<std::size_t>(nx));
  auto row = [&](int k) { return values.data() + static_cast<std::size_t>(k) * nx; };

  double* terminal = row(g.nt);
  for (int j = 0; j < nx; ++j) terminal[j] = c.eval_phi(g.x_of(j));

  const double inv_2dx = 1.0 / (2.0 * dx);
  const double inv_dx2 = 1.0 / (dx * dx);

  for (int k = g.nt - 1; k >= 0; --k) {
    const double* next = row(k + 1);
    double* cur = row(k);
    const double t_next = opts.t_offset + (k + 1) * dt;
    for (int j = 0; j < nx; ++j) {
      const double x = g.x_of(j);
      const double u = next[j];
      double ux, uxx;
      if (j == 0) {
        ux = (next[1] - next[0]) / dx;
        uxx = 0.0;
      } else if (j == nx - 1) {
        ux = (next[nx - 1] - next[nx - 2]) / dx;
        uxx = 0.0;
      } else {
        ux = (next[j + 1] - next[j - 1]) * inv_2dx;
        uxx = (next[j + 1] - 2.0 * u + next[j - 1]) * inv_dx2;
      }
      const double sig = c.eval_sigma(t_next, x, u);
      const double z = ux * sig;
      const double a = uxx * sig * sig + 2.0 * ux * c.eval_h(t_next, x, u) +
                       2.0 * c.eval_g(t_next, x, u, z);
      const double v =
          u + dt * (ux * c.eval_b(t_next, x, u) + g_eval(params, a) + c.eval_f(t_next, x, u, z));
      if (!std::isfinite(v)) {
        throw BlowUpError("solve_pde: non-finite value at (t=" + std::to_string(k * dt) +
                              ", x=" + std::to_string(x) + ")",
                          k * dt, x);
      }
      cur[j] = v;
    }
  }

  DecouplingField field(g, std::move(values));
  if (meta) {
    meta->m0 = field.m0();
    meta->m_lip = field.lipschitz();
    meta->dt = dt;
    meta->nt = g.nt;
    meta->cfl_bound = rate;
    double resid = 0.0;
    for (int j = 0; j < nx; ++j) {
      resid = std::max(resid, std::fabs(field.at(g.nt, j) - c.eval_phi(g.x_of(j))));
    }
    meta->terminal_residual = resid;
  }
  return field;
}

}  // namespace gfbsde
