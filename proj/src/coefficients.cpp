#include "gfbsde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gfbsde/mollifier.hpp"

namespace gfbsde {

CoefficientBundle CoefficientBundle::from_sources(const std::string& b_src,
                                                  const std::string& h_src,
                                                  const std::string& sigma_src,
                                                  const std::string& f_src,
                                                  const std::string& g_src,
                                                  const std::string& phi_src, double L, double M,
                                                  double lambda, double beta, double T) {
  CoefficientBundle c;
  c.b = parse_bound(b_src, VarMask::of_txy(), "b");
  c.h = parse_bound(h_src, VarMask::of_txy(), "h");
  c.sigma = parse_bound(sigma_src, VarMask::of_txy(), "sigma");
  c.f = parse_bound(f_src, VarMask::of_txyz(), "f");
  c.g = parse_bound(g_src, VarMask::of_txyz(), "g");
  c.phi = parse_bound(phi_src, VarMask::of_x(), "phi");
  c.L = L;
  c.M = M;
  c.lambda = lambda;
  c.beta = beta;
  c.T = T;
  c.validate();
  return c;
}

void CoefficientBundle::validate() const {
  if (!(L > 0.0)) throw ConfigError("CoefficientBundle: L must be > 0");
  if (!(lambda > 0.0)) throw ConfigError("CoefficientBundle: lambda must be > 0");
  if (!(beta > 2.0)) throw ConfigError("CoefficientBundle: beta must be > 2");
  if (!(T > 0.0)) throw ConfigError("CoefficientBundle: T must be > 0");
  if (!(M > 0.0)) throw ConfigError("CoefficientBundle: M must be > 0");
}

CoefficientBundle CoefficientBundle::with_mollified_phi(double x0, double dx, int count,
                                                        int n) const {
  std::vector<double> samples(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    samples[static_cast<std::size_t>(j)] = eval_phi(x0 + j * dx);
  }
  Samples1D table;
  table.x0 = x0;
  table.dx = dx;
  table.values = mollify(samples, dx, n);
  CoefficientBundle out = *this;
  out.phi_table = std::move(table);
  return out;
}

namespace {

ExprPtr blend_expr(const ExprPtr& a, const ExprPtr& b, double eps) {
  if (a->structurally_equal(*b)) return a;  // keeps c' = c exact
  return Expr::binary(Expr::Op::Add, a,
                      Expr::binary(Expr::Op::Mul, Expr::number(eps),
                                   Expr::binary(Expr::Op::Sub, b, a)));
}

}  // namespace

CoefficientBundle CoefficientBundle::blend_toward(const CoefficientBundle& other,
                                                  double eps) const {
  CoefficientBundle out = *this;
  out.b = blend_expr(b, other.b, eps);
  out.h = blend_expr(h, other.h, eps);
  out.sigma = blend_expr(sigma, other.sigma, eps);
  out.f = blend_expr(f, other.f, eps);
  out.g = blend_expr(g, other.g, eps);
  out.phi = blend_expr(phi, other.phi, eps);
  if (phi_table || other.phi_table) {
    if (!phi_table || !other.phi_table || phi_table->values.size() != other.phi_table->values.size() ||
        phi_table->x0 != other.phi_table->x0 || phi_table->dx != other.phi_table->dx) {
      throw ConfigError("blend_toward: terminal sample tables must share a grid");
    }
    Samples1D t = *phi_table;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      t.values[i] += eps * (other.phi_table->values[i] - t.values[i]);
    }
    out.phi_table = std::move(t);
  }
  out.L = std::max(L, other.L);
  out.M = std::max(M, other.M);
  out.lambda = std::min(lambda, other.lambda);
  out.beta = std::min(beta, other.beta);
  return out;
}

namespace {

struct Worst {
  double value = 0.0;
  double at[4] = {0, 0, 0, 0};
  void consider(double v, double t, double x, double y, double z) {
    if (v > value) {
      value = v;
      at[0] = t;
      at[1] = x;
      at[2] = y;
      at[3] = z;
    }
  }
};

std::string point_string(const double* p) {
  return "(t=" + std::to_string(p[0]) + ", x=" + std::to_string(p[1]) +
         ", y=" + std::to_string(p[2]) + ", z=" + std::to_string(p[3]) + ")";
}

double guarded_eval(const ExprPtr& e, const Env& env) {
  try {
    return e->eval(env);
  } catch (const EvalDomainError& err) {
    throw EvalDomainError(std::string(err.what()) + " at probe (t=" + std::to_string(env.t) +
                              ", x=" + std::to_string(env.x) + ", y=" + std::to_string(env.y) +
                              ", z=" + std::to_string(env.z) + ")",
                          err.subexpr());
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(std::max(n, 1)));
  if (n <= 1) {
    v[0] = a;
    return v;
  }
  const double step = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + i * step;
  return v;
}

}  // namespace

AssumptionReport verify_assumptions(const CoefficientBundle& c, const ProbeGrid& probe,
                                    double tolerance) {
  AssumptionReport report;

  const auto ts = linspace(probe.t0, probe.t1, probe.nt);
  const auto xs = linspace(probe.x0, probe.x1, probe.nx);
  const auto ys = linspace(probe.y0, probe.y1, probe.ny);
  const auto zs = linspace(probe.z0, probe.z1, probe.nz);

  struct Slot {
    const char* name;
    ExprPtr expr;
    bool has_z;
  };
  const Slot slots_xy[] = {{"b", c.b, false}, {"h", c.h, false}, {"sigma", c.sigma, false}};
  const Slot slots_xyz[] = {{"f", c.f, true}, {"g", c.g, true}};

  auto push = [&](const std::string& name, double observed, double bound, bool pass,
                  std::string detail) {
    report.clauses.push_back({name, observed, bound, pass, std::move(detail)});
  };

  // Lipschitz quotients from axis-adjacent difference pairs; growth
  // ratios pointwise; all advisory.
  for (const Slot& s : slots_xy) {
    Worst lip, growth;
    for (double t : ts)
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) {
          const double x = xs[i], y = ys[j];
          const double v = guarded_eval(s.expr, {t, x, y, 0.0});
          growth.consider(std::fabs(v) / (c.L * (1.0 + std::fabs(y))), t, x, y, 0.0);
          if (i + 1 < xs.size()) {
            const double v2 = guarded_eval(s.expr, {t, xs[i + 1], y, 0.0});
            lip.consider(std::fabs(v2 - v) / (xs[i + 1] - x), t, x, y, 0.0);
          }
          if (j + 1 < ys.size()) {
            const double v2 = guarded_eval(s.expr, {t, x, ys[j + 1], 0.0});
            lip.consider(std::fabs(v2 - v) / (ys[j + 1] - y), t, x, y, 0.0);
          }
        }
    push(std::string("lipschitz.") + s.name, lip.value, c.L, lip.value <= c.L + tolerance,
         "worst quotient at " + point_string(lip.at));
    push(std::string("growth.") + s.name, growth.value, 1.0, growth.value <= 1.0 + tolerance,
         "|" + std::string(s.name) + "|/(L(1+|y|)) at " + point_string(growth.at));
  }

  for (const Slot& s : slots_xyz) {
    Worst lip, growth;
    for (double t : ts)
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
          for (std::size_t k = 0; k < zs.size(); ++k) {
            const double x = xs[i], y = ys[j], z = zs[k];
            const double v = guarded_eval(s.expr, {t, x, y, z});
            growth.consider(std::fabs(v) / (c.L * (1.0 + std::fabs(y) + std::fabs(z))), t, x, y, z);
            if (i + 1 < xs.size()) {
              const double v2 = guarded_eval(s.expr, {t, xs[i + 1], y, z});
              lip.consider(std::fabs(v2 - v) / (xs[i + 1] - x), t, x, y, z);
            }
            if (j + 1 < ys.size()) {
              const double v2 = guarded_eval(s.expr, {t, x, ys[j + 1], z});
              lip.consider(std::fabs(v2 - v) / (ys[j + 1] - y), t, x, y, z);
            }
            if (k + 1 < zs.size()) {
              const double v2 = guarded_eval(s.expr, {t, x, y, zs[k + 1]});
              lip.consider(std::fabs(v2 - v) / (zs[k + 1] - z), t, x, y, z);
            }
          }
    push(std::string("lipschitz.") + s.name, lip.value, c.L, lip.value <= c.L + tolerance,
         "worst quotient at " + point_string(lip.at));
    push(std::string("growth.") + s.name, growth.value, 1.0, growth.value <= 1.0 + tolerance,
         "|" + std::string(s.name) + "|/(L(1+|y|+|z|)) at " + point_string(growth.at));
  }

  {
    Worst lip, bound;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double v = c.eval_phi(xs[i]);
      bound.consider(std::fabs(v), 0, xs[i], 0, 0);
      if (i + 1 < xs.size()) {
        const double v2 = c.eval_phi(xs[i + 1]);
        lip.consider(std::fabs(v2 - v) / (xs[i + 1] - xs[i]), 0, xs[i], 0, 0);
      }
    }
    push("lipschitz.phi", lip.value, c.L, lip.value <= c.L + tolerance,
         "worst quotient at " + point_string(lip.at));
    push("bound.phi", bound.value, c.M, bound.value <= c.M + tolerance,
         "max |phi| at " + point_string(bound.at));
  }

  {
    Worst bound;
    double min_sq = std::numeric_limits<double>::infinity();
    double min_at[4] = {0, 0, 0, 0};
    for (double t : ts)
      for (double x : xs)
        for (double y : ys) {
          const double v = guarded_eval(c.sigma, {t, x, y, 0.0});
          bound.consider(std::fabs(v), t, x, y, 0.0);
          if (v * v < min_sq) {
            min_sq = v * v;
            min_at[0] = t;
            min_at[1] = x;
            min_at[2] = y;
          }
        }
    push("bound.sigma", bound.value, c.M, bound.value <= c.M + tolerance,
         "max |sigma| at " + point_string(bound.at));
    push("ellipticity.sigma", min_sq, c.lambda, min_sq >= c.lambda - tolerance,
         "min sigma^2 at " + point_string(min_at));
  }

  return report;
}

}  // namespace gfbsde
