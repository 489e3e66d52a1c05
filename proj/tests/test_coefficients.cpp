#include <doctest.h>

#include <cmath>

#include "gfbsde/coefficients.hpp"

using namespace gfbsde;

namespace {

CoefficientBundle simple_bundle(const std::string& sigma, const std::string& phi, double L,
                                double M, double lambda) {
  return CoefficientBundle::from_sources("0", "0", sigma, "0", "0", phi, L, M, lambda, 4.0, 1.0);
}

const AssumptionClause& clause(const AssumptionReport& rep, const std::string& name) {
  for (const auto& c : rep.clauses) {
    if (c.name == name) return c;
  }
  FAIL("missing clause ", name);
  return rep.clauses.front();
}

}  // namespace

TEST_CASE("constant sigma passes the ellipticity floor") {
  const CoefficientBundle c = simple_bundle("1.0", "tanh(x)", 1.0, 1.5, 0.5);
  const AssumptionReport rep = verify_assumptions(c, ProbeGrid::defaults(1.0), 1e-9);
  const auto& ell = clause(rep, "ellipticity.sigma");
  CHECK(ell.pass);
  CHECK(ell.observed == doctest::Approx(1.0));
  CHECK(rep.all_pass());
}

TEST_CASE("terminal slope exceeding L fails the Lipschitz clause") {
  const CoefficientBundle c = simple_bundle("1.0", "2*x", 1.0, 100.0, 0.5);
  const AssumptionReport rep = verify_assumptions(c, ProbeGrid::defaults(1.0), 1e-9);
  const auto& lip = clause(rep, "lipschitz.phi");
  CHECK_FALSE(lip.pass);
  CHECK(lip.observed == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("tanh terminal stays within unit Lipschitz bound") {
  const CoefficientBundle c = simple_bundle("1.0", "tanh(x)", 1.0, 1.5, 0.5);
  ProbeGrid dense = ProbeGrid::defaults(1.0);
  dense.nx = 401;  // dense difference-quotient sampling
  const AssumptionReport rep = verify_assumptions(c, dense, 1e-9);
  const auto& lip = clause(rep, "lipschitz.phi");
  CHECK(lip.pass);
  CHECK(lip.observed <= 1.0);
  CHECK(lip.observed > 0.9);  // quotients approach sup |tanh'| = 1 near 0
}

TEST_CASE("sigma below the ellipticity floor is reported") {
  const CoefficientBundle c = simple_bundle("0.5", "tanh(x)", 1.0, 1.5, 0.5);
  const AssumptionReport rep = verify_assumptions(c, ProbeGrid::defaults(1.0), 1e-9);
  const auto& ell = clause(rep, "ellipticity.sigma");
  CHECK_FALSE(ell.pass);  // sigma^2 = 0.25 < 0.5
  CHECK(ell.observed == doctest::Approx(0.25));
}

TEST_CASE("bound clause flags |sigma| above M") {
  const CoefficientBundle c = simple_bundle("2.0", "tanh(x)", 1.0, 1.5, 0.5);
  const AssumptionReport rep = verify_assumptions(c, ProbeGrid::defaults(1.0), 1e-9);
  CHECK_FALSE(clause(rep, "bound.sigma").pass);
}

TEST_CASE("globally Lipschitz bundle never exceeds its constant") {
  // growth and Lipschitz bounds hold analytically for this bundle; the
  // sampled quotients must not report a violation on any probe grid
  const CoefficientBundle c = CoefficientBundle::from_sources(
      "0.3*tanh(y)", "0.1*sin(y)", "1 + 0.25*tanh(y)", "0.4*cos(x) - 0.3*y + 0.2*z",
      "0.1*tanh(z) + 0.05*sin(y)", "tanh(x)", 1.0, 1.3, 0.5, 4.0, 1.0);
  for (const int nx : {11, 41, 161}) {
    ProbeGrid probe = ProbeGrid::defaults(1.0);
    probe.nx = nx;
    const AssumptionReport rep = verify_assumptions(c, probe, 1e-9);
    CHECK(rep.all_pass());
  }
}

TEST_CASE("evaluation domain errors carry probe coordinates") {
  const CoefficientBundle c = simple_bundle("1/x", "tanh(x)", 1.0, 1.5, 0.5);
  ProbeGrid probe = ProbeGrid::defaults(1.0);
  probe.x0 = -1.0;
  probe.x1 = 1.0;
  probe.nx = 3;  // hits x = 0
  try {
    verify_assumptions(c, probe, 1e-9);
    FAIL("expected EvalDomainError");
  } catch (const EvalDomainError& e) {
    CHECK(std::string(e.what()).find("at probe") != std::string::npos);
  }
}

TEST_CASE("constants validation") {
  CHECK_THROWS_AS(simple_bundle("1", "x", 0.0, 1.0, 0.5), ConfigError);   // L > 0
  CHECK_THROWS_AS(simple_bundle("1", "x", 1.0, 1.0, 0.0), ConfigError);   // lambda > 0
  CHECK_THROWS_AS(CoefficientBundle::from_sources("0", "0", "1", "0", "0", "x", 1.0, 1.0, 0.5,
                                                  2.0, 1.0),
                  ConfigError);  // beta > 2
}

TEST_CASE("mollified terminal table evaluates with constant extension") {
  const CoefficientBundle c = simple_bundle("1.0", "abs(x)", 1.0, 10.0, 0.5);
  const CoefficientBundle cn = c.with_mollified_phi(-2.0, 0.0125, 321, 10);
  REQUIRE(cn.phi_table.has_value());
  // smoothing keeps |x| within L/n away from the kink
  CHECK(std::fabs(cn.eval_phi(1.0) - 1.0) <= 0.1);
  CHECK(std::fabs(cn.eval_phi(0.0)) <= 0.1);
  // beyond the sampled range the table extends its edge value
  CHECK(cn.eval_phi(50.0) == cn.eval_phi(2.0));
}

TEST_CASE("blend_toward interpolates coefficients and keeps shared slots exact") {
  const CoefficientBundle c = simple_bundle("1.0", "tanh(x)", 1.0, 1.5, 0.5);
  CoefficientBundle cp = c;
  cp.f = parse_bound("0.25", VarMask::of_txyz(), "f");
  const CoefficientBundle mid = c.blend_toward(cp, 0.5);
  CHECK(mid.eval_f(0, 0, 0, 0) == doctest::Approx(0.125).epsilon(1e-15));
  // untouched slots share structure, so the blend short-circuits exactly
  CHECK(mid.eval_sigma(0.3, 0.7, -0.2) == c.eval_sigma(0.3, 0.7, -0.2));
  CHECK(mid.eval_phi(0.4) == c.eval_phi(0.4));
}
