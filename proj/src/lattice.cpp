#include "gfbsde/lattice.hpp"

#include <cmath>

#include "gfbsde/errors.hpp"

namespace gfbsde {

namespace {

void check_inputs(const GParams& params, double T, int N) {
  params.validate();
  if (!(T > 0.0)) throw ConfigError("lattice: horizon T must be positive");
  if (N < 1) throw ConfigError("lattice: step count N must be >= 1");
}

std::vector<double> terminal_level(const ExprPtr& phi, double dx, int N, double dt) {
  std::vector<double> level(static_cast<std::size_t>(2 * N + 1));
  for (int j = 0; j <= 2 * N; ++j) {
    const double x = (j - N) * dx;
    const double v = phi->eval({0.0, x, 0.0, 0.0});
    if (!std::isfinite(v)) {
      throw BlowUpError("lattice: non-finite terminal value (unbounded phi) at x=" +
                            std::to_string(x),
                        N * dt, x);
    }
    level[static_cast<std::size_t>(j)] = v;
  }
  return level;
}

}  // namespace

LatticeField conditional_field(const GParams& params, const ExprPtr& phi, double T, int N) {
  check_inputs(params, T, N);
  LatticeField lat;
  lat.steps = N;
  lat.T = T;
  lat.dt = T / N;
  lat.dx = params.sigma_hi * std::sqrt(lat.dt);
  lat.levels.resize(static_cast<std::size_t>(N + 1));
  lat.levels[static_cast<std::size_t>(N)] = terminal_level(phi, lat.dx, N, lat.dt);

  const double inv_dx2 = 1.0 / (lat.dx * lat.dx);
  for (int k = N - 1; k >= 0; --k) {
    const auto& next = lat.levels[static_cast<std::size_t>(k + 1)];
    auto& cur = lat.levels[static_cast<std::size_t>(k)];
    cur.resize(static_cast<std::size_t>(2 * k + 1));
    for (int j = 0; j <= 2 * k; ++j) {
      // offset j-k at level k sits under offset j-k at level k+1, i.e.
      // index j+1 in the wider next level.
      const double up = next[static_cast<std::size_t>(j + 2)];
      const double mid = next[static_cast<std::size_t>(j + 1)];
      const double dn = next[static_cast<std::size_t>(j)];
      cur[static_cast<std::size_t>(j)] = mid + lat.dt * g_eval(params, (up - 2.0 * mid + dn) * inv_dx2);
    }
  }
  return lat;
}

double g_expectation(const GParams& params, const ExprPtr& phi, double T, int N) {
  return conditional_field(params, phi, T, N).value(0, 0);
}

double g_expectation_from_values(const GParams& params, const std::vector<double>& terminal,
                                 double dt) {
  params.validate();
  if (terminal.empty() || terminal.size() % 2 == 0) {
    throw ConfigError("lattice: terminal slice must hold 2N+1 values");
  }
  if (!(dt > 0.0)) throw ConfigError("lattice: dt must be positive");
  const int N = static_cast<int>((terminal.size() - 1) / 2);
  const double dx = params.sigma_hi * std::sqrt(dt);
  const double inv_dx2 = 1.0 / (dx * dx);
  std::vector<double> next = terminal;
  std::vector<double> cur;
  for (int k = N - 1; k >= 0; --k) {
    cur.resize(static_cast<std::size_t>(2 * k + 1));
    for (int j = 0; j <= 2 * k; ++j) {
      const double up = next[static_cast<std::size_t>(j + 2)];
      const double mid = next[static_cast<std::size_t>(j + 1)];
      const double dn = next[static_cast<std::size_t>(j)];
      cur[static_cast<std::size_t>(j)] =
          mid + dt * g_eval(params, (up - 2.0 * mid + dn) * inv_dx2);
    }
    next.swap(cur);
  }
  return next[0];
}

LatticeField scenario_field(const GParams& params, const ExprPtr& phi, double T, int N,
                            const NodeScenario& gamma) {
  check_inputs(params, T, N);
  LatticeField lat;
  lat.steps = N;
  lat.T = T;
  lat.dt = T / N;
  lat.dx = params.sigma_hi * std::sqrt(lat.dt);
  lat.levels.resize(static_cast<std::size_t>(N + 1));
  lat.levels[static_cast<std::size_t>(N)] = terminal_level(phi, lat.dx, N, lat.dt);

  const double inv_dx2 = 1.0 / (lat.dx * lat.dx);
  for (int k = N - 1; k >= 0; --k) {
    const auto& next = lat.levels[static_cast<std::size_t>(k + 1)];
    auto& cur = lat.levels[static_cast<std::size_t>(k)];
    cur.resize(static_cast<std::size_t>(2 * k + 1));
    for (int j = 0; j <= 2 * k; ++j) {
      const double x = (j - k) * lat.dx;
      const double g = gamma(k, x);
      if (g < params.gamma_lo() - 1e-12 || g > params.gamma_hi() + 1e-12) {
        throw ConfigError("scenario gamma " + std::to_string(g) +
                          " outside [sigma_lo^2, sigma_hi^2]");
      }
      const double up = next[static_cast<std::size_t>(j + 2)];
      const double mid = next[static_cast<std::size_t>(j + 1)];
      const double dn = next[static_cast<std::size_t>(j)];
      // same arithmetic form as the G-step so the argmax replay is exact
      cur[static_cast<std::size_t>(j)] = mid + lat.dt * (0.5 * g * ((up - 2.0 * mid + dn) * inv_dx2));
    }
  }
  return lat;
}

ArgmaxScenario conditional_field_with_argmax(const GParams& params, const ExprPtr& phi, double T,
                                             int N) {
  check_inputs(params, T, N);
  ArgmaxScenario out;
  LatticeField& lat = out.field;
  lat.steps = N;
  lat.T = T;
  lat.dt = T / N;
  lat.dx = params.sigma_hi * std::sqrt(lat.dt);
  lat.levels.resize(static_cast<std::size_t>(N + 1));
  lat.levels[static_cast<std::size_t>(N)] = terminal_level(phi, lat.dx, N, lat.dt);
  out.gamma.resize(static_cast<std::size_t>(N));

  const double inv_dx2 = 1.0 / (lat.dx * lat.dx);
  for (int k = N - 1; k >= 0; --k) {
    const auto& next = lat.levels[static_cast<std::size_t>(k + 1)];
    auto& cur = lat.levels[static_cast<std::size_t>(k)];
    auto& gam = out.gamma[static_cast<std::size_t>(k)];
    cur.resize(static_cast<std::size_t>(2 * k + 1));
    gam.resize(static_cast<std::size_t>(2 * k + 1));
    for (int j = 0; j <= 2 * k; ++j) {
      const double up = next[static_cast<std::size_t>(j + 2)];
      const double mid = next[static_cast<std::size_t>(j + 1)];
      const double dn = next[static_cast<std::size_t>(j)];
      const double second = (up - 2.0 * mid + dn) * inv_dx2;
      const double g = g_argmax(params, second);
      gam[static_cast<std::size_t>(j)] = g;
      cur[static_cast<std::size_t>(j)] = mid + lat.dt * (0.5 * g * second);
    }
  }
  return out;
}

NodeScenario ArgmaxScenario::as_node_scenario() const {
  const auto* self = this;
  return [self](int k, double x) {
    const auto& row = self->gamma[static_cast<std::size_t>(k)];
    const int j = static_cast<int>(std::lround(x / self->field.dx)) + k;
    return row[static_cast<std::size_t>(j)];
  };
}

}  // namespace gfbsde
