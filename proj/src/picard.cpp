#include "gfbsde/picard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gfbsde/pde.hpp"

namespace gfbsde {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// One application of the map: backward lattice sweep with forward
// coefficients frozen at the iterate y (its value at the known level),
// f and g implicit in (Y, Z) per node.
void apply_map(const CoefficientBundle& c, const GParams& params, const Grid1D& g, double t_a,
               double dt, const std::vector<double>& frozen, std::vector<double>& out,
               const std::vector<double>& terminal, const PicardOptions& opts) {
  const int nx = g.nx;
  const double dx = g.dx();
  const double inv_2dx = 1.0 / (2.0 * dx);
  const double inv_dx2 = 1.0 / (dx * dx);

  std::copy(terminal.begin(), terminal.end(),
            out.begin() + static_cast<std::ptrdiff_t>(g.nt) * nx);

  for (int k = g.nt - 1; k >= 0; --k) {
    const double* next = out.data() + static_cast<std::size_t>(k + 1) * nx;
    double* cur = out.data() + static_cast<std::size_t>(k) * nx;
    const double t_next = t_a + (k + 1) * dt;
    for (int j = 0; j < nx; ++j) {
      const double x = g.x_of(j);
      const double base = next[j];
      double ux, uxx;
      if (j == 0) {
        ux = (next[1] - next[0]) / dx;
        uxx = 0.0;
      } else if (j == nx - 1) {
        ux = (next[nx - 1] - next[nx - 2]) / dx;
        uxx = 0.0;
      } else {
        ux = (next[j + 1] - next[j - 1]) * inv_2dx;
        uxx = (next[j + 1] - 2.0 * base + next[j - 1]) * inv_dx2;
      }
      const double y_frozen = frozen[static_cast<std::size_t>(k + 1) * nx + j];
      const double bv = c.eval_b(t_next, x, y_frozen);
      const double hv = c.eval_h(t_next, x, y_frozen);
      const double sig = c.eval_sigma(t_next, x, y_frozen);
      // Z as the lattice difference quotient in Brownian units, i.e.
      // the u_x * sigma identity
      const double zv = sig * ux;

      // inner fixed point in Y (Z is fixed by the known level); damping
      // halves once oscillation shows up
      double yv = base;
      double damp = 1.0;
      double prev_delta = 0.0;
      bool have_prev = false;
      bool settled = false;
      for (int it = 0; it < opts.inner_max; ++it) {
        const double a = uxx * sig * sig + 2.0 * ux * hv + 2.0 * c.eval_g(t_next, x, yv, zv);
        const double cand =
            base + dt * (ux * bv + g_eval(params, a) + c.eval_f(t_next, x, yv, zv));
        const double delta = cand - yv;
        if (std::fabs(delta) <= opts.inner_tol) {
          yv = cand;
          settled = true;
          break;
        }
        if (have_prev && delta * prev_delta < 0.0) damp = 0.5;
        yv += damp * delta;
        prev_delta = delta;
        have_prev = true;
      }
      if (!settled) {
        throw Error("picard: inner (Y,Z) fixed point did not reach " +
                    std::to_string(opts.inner_tol) + " at (t=" + std::to_string(t_a + k * dt) +
                    ", x=" + std::to_string(x) + ")");
      }
      if (!std::isfinite(yv)) {
        throw BlowUpError("picard: non-finite value", t_a + k * dt, x);
      }
      cur[j] = yv;
    }
  }
}

}  // namespace

PicardResult picard_solve(const CoefficientBundle& c, const GParams& params, double t_a,
                          double t_b, const std::vector<double>& terminal, const Grid1D& grid,
                          const PicardOptions& opts, const std::vector<double>* initial_guess) {
  params.validate();
  if (!(t_b > t_a)) throw ConfigError("picard: need t_b > t_a");
  if (terminal.size() != static_cast<std::size_t>(grid.nx)) {
    throw ConfigError("picard: terminal data size does not match grid");
  }

  Grid1D g = grid;
  g.T = t_b - t_a;
  g.nt = opts.nt_override;
  if (g.nt == 0) {
    Grid1D probe = g;
    probe.T = t_b;  // probe coefficient magnitudes over absolute time
    double term_max = 0.0;
    for (const double v : terminal) term_max = std::max(term_max, std::fabs(v));
    const double rate = cfl_rate(c, params, probe, 2.0 * term_max + 1.0);
    g.nt = std::max(1, static_cast<int>(std::ceil(g.T * rate / opts.cfl_safety)));
  }
  g.validate();
  if (initial_guess && initial_guess->size() != static_cast<std::size_t>(g.nx)) {
    throw ConfigError("picard: initial guess size does not match grid");
  }
  const double dt = g.T / g.nt;

  const auto total = static_cast<std::size_t>(g.nt + 1) * static_cast<std::size_t>(g.nx);
  std::vector<double> y(total), v(total);
  for (int k = 0; k <= g.nt; ++k) {
    const double* src = initial_guess ? initial_guess->data() : terminal.data();
    std::copy(src, src + g.nx, y.begin() + static_cast<std::ptrdiff_t>(k) * g.nx);
  }

  IterationState state;
  std::vector<double> ratios;
  int stall = 0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    apply_map(c, params, g, t_a, dt, y, v, terminal, opts);
    double d = 0.0;
    for (std::size_t i = 0; i < total; ++i) d = std::max(d, std::fabs(v[i] - y[i]));
    state.distances.push_back(d);
    state.iterations = iter + 1;
    y.swap(v);

    const std::size_t nd = state.distances.size();
    if (nd >= 2 && state.distances[nd - 2] > 0.0) {
      const double r = d / state.distances[nd - 2];
      ratios.push_back(r);
      if (r >= 1.0 && state.distances[nd - 2] > 10.0 * opts.tol) {
        if (++stall >= 5) {
          throw NonContractionError(
              "picard: sweep distances not contracting over 5 iterations on horizon length " +
              std::to_string(t_b - t_a) + "; bisect the horizon");
        }
      } else {
        stall = 0;
      }
    }
    if (d == 0.0) {
      state.converged = true;
      break;
    }
    if (d <= opts.tol && state.iterations >= opts.min_iter) {
      state.converged = true;
      break;
    }
  }
  state.ratio_median = median_of(ratios);

  return PicardResult{DecouplingField(g, std::move(y)), std::move(state)};
}

DeltaEstimate estimate_delta(const CoefficientBundle& c, const GParams& params, const Grid1D& grid,
                             double T_max) {
  if (!(T_max > 0.0)) throw ConfigError("estimate_delta: T_max must be positive");
  const double t_end = c.T;
  std::vector<double> terminal(static_cast<std::size_t>(grid.nx));
  for (int j = 0; j < grid.nx; ++j) terminal[static_cast<std::size_t>(j)] = c.eval_phi(grid.x_of(j));

  DeltaEstimate est;
  auto probe = [&](double horizon) -> std::pair<bool, double> {
    PicardOptions opts;
    opts.min_iter = 11;
    opts.max_iter = 13;
    opts.tol = 1e-13;
    try {
      const PicardResult r =
          picard_solve(c, params, t_end - horizon, t_end, terminal, grid, opts);
      const double ratio = r.state.ratio_median;
      est.trace.emplace_back(horizon, ratio);
      return {ratio <= 0.5, ratio};
    } catch (const NonContractionError&) {
      est.trace.emplace_back(horizon, std::numeric_limits<double>::infinity());
      return {false, std::numeric_limits<double>::infinity()};
    }
  };

  if (probe(T_max).first) {
    est.delta = T_max;
    return est;
  }
  double lo = 0.0, hi = T_max;
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid).first) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  est.delta = lo;
  return est;
}

StitchResult stitch_solve(const CoefficientBundle& c, const GParams& params, double T,
                          double delta0, const Grid1D& grid, const PicardOptions& opts) {
  if (!(T > 0.0) || !(delta0 > 0.0)) throw ConfigError("stitch: need T > 0 and delta0 > 0");
  const int n_cells = std::max(1, static_cast<int>(std::ceil(T / delta0 - 1e-12)));
  const double len = T / n_cells;

  // one stability probe for the whole horizon keeps the glued time step
  // uniform across cells
  Grid1D probe = grid;
  probe.T = T;
  probe.nt = 0;
  double phi_max = 0.0;
  for (int j = 0; j < grid.nx; ++j) phi_max = std::max(phi_max, std::fabs(c.eval_phi(grid.x_of(j))));
  const double rate = cfl_rate(c, params, probe, 2.0 * phi_max + 1.0);
  PicardOptions cell_opts = opts;
  if (cell_opts.nt_override == 0) {
    cell_opts.nt_override =
        std::max(1, static_cast<int>(std::ceil(len * rate / opts.cfl_safety)));
  }
  const int nt_cell = cell_opts.nt_override;

  StitchResult result{DecouplingField(
                          [&] {
                            Grid1D g = grid;
                            g.T = T;
                            g.nt = n_cells * nt_cell;
                            return g;
                          }(),
                          std::vector<double>(
                              static_cast<std::size_t>(n_cells * nt_cell + 1) *
                              static_cast<std::size_t>(grid.nx))),
                      n_cells, len, 0.0, {}};

  std::vector<double> terminal(static_cast<std::size_t>(grid.nx));
  for (int j = 0; j < grid.nx; ++j) terminal[static_cast<std::size_t>(j)] = c.eval_phi(grid.x_of(j));

  for (int cell = n_cells - 1; cell >= 0; --cell) {
    const double t_a = cell * len;
    const double t_b = (cell + 1) * len;
    PicardResult r = picard_solve(c, params, t_a, t_b, terminal, grid, cell_opts);
    result.cell_states.push_back(std::move(r.state));

    // seam guard: this cell's terminal level against what the later cell
    // already wrote at the seam (identical by assignment)
    if (cell < n_cells - 1) {
      double gap = 0.0;
      for (int j = 0; j < grid.nx; ++j) {
        gap = std::max(gap, std::fabs(result.field.at((cell + 1) * nt_cell, j) -
                                      r.field.at(nt_cell, j)));
      }
      result.seam_gap = std::max(result.seam_gap, gap);
    }

    for (int k = 0; k <= nt_cell; ++k) {
      const int k_global = cell * nt_cell + k;
      for (int j = 0; j < grid.nx; ++j) {
        result.field.at(k_global, j) = r.field.at(k, j);
      }
    }
    // next cell's terminal data is this cell's first level
    for (int j = 0; j < grid.nx; ++j) terminal[static_cast<std::size_t>(j)] = r.field.at(0, j);
  }
  return result;
}

}  // namespace gfbsde
