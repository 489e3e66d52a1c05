#include <doctest.h>

#include <cmath>

#include "gfbsde/lattice.hpp"
#include "gfbsde/rng.hpp"

using namespace gfbsde;

TEST_CASE("moment values of the G-normal terminal distribution") {
  const GParams p{0.8, 1.2};

  // the recursion is exact on linear and quadratic terminals
  CHECK(std::fabs(g_expectation(p, parse("x"), 1.0, 100)) <= 5e-13);
  CHECK(g_expectation(p, parse("x^2"), 1.0, 200) == doctest::Approx(1.44).epsilon(2e-2));
  CHECK(g_expectation(p, parse("-x^2"), 1.0, 200) == doctest::Approx(-0.64).epsilon(2e-2));
  CHECK(std::fabs(g_expectation(p, parse("x^2"), 1.0, 200) - 1.44) <= 1e-12);
  CHECK(std::fabs(g_expectation(p, parse("-x^2"), 1.0, 200) + 0.64) <= 1e-12);
}

TEST_CASE("input validation and unbounded terminal detection") {
  const GParams p{0.8, 1.2};
  CHECK_THROWS_AS(g_expectation(p, parse("x"), 0.0, 100), ConfigError);
  CHECK_THROWS_AS(g_expectation(p, parse("x"), 1.0, 0), ConfigError);
  // exp(x^2) overflows on the reachable range for large N
  CHECK_THROWS_AS(g_expectation(p, parse("exp(x^2)"), 1.0, 500), BlowUpError);
}

TEST_CASE("conditional field preserves constants") {
  const GParams p{0.8, 1.2};
  const LatticeField lat = conditional_field(p, parse("2.5"), 1.0, 40);
  for (int k = 0; k <= lat.steps; ++k) {
    for (int j = -k; j <= k; ++j) {
      CHECK(lat.value(k, j) == 2.5);
    }
  }
}

TEST_CASE("conditional field at interior levels matches a re-rooted run") {
  const GParams p{0.8, 1.2};
  const int N = 120;
  const double T = 1.0;
  const LatticeField lat = conditional_field(p, parse("x^2"), T, N);
  for (const int k : {30, 60, 90}) {
    // value at level k, node 0 is the G-expectation over horizon T - t_k
    const double expected = g_expectation(p, parse("x^2"), T - lat.t_of(k), N - k);
    CHECK(lat.value(k, 0) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(lat.value(k, 0) == doctest::Approx(p.gamma_hi() * (T - lat.t_of(k))).epsilon(1e-9));
  }
}

TEST_CASE("tower property: re-rooting a level slice reproduces the root bitwise") {
  const GParams p{0.8, 1.2};
  const int N = 64;
  const LatticeField lat = conditional_field(p, parse("tanh(x)"), 1.0, N);
  for (const int k : {16, 32, 48}) {
    const double re_rooted = g_expectation_from_values(p, lat.levels[k], lat.dt);
    CHECK(re_rooted == lat.value(0, 0));
  }
}

TEST_CASE("lattice functional is sublinear") {
  const GParams p{0.8, 1.2};
  const double T = 0.5;
  const int N = 60;
  const auto value = [&](const ExprPtr& phi) { return g_expectation(p, phi, T, N); };

  const ExprPtr phi = parse("tanh(x)");
  const ExprPtr psi = parse("cos(x)");
  const ExprPtr sum = parse("tanh(x) + cos(x)");
  const double scale = 1.0;

  CHECK(value(sum) <= value(phi) + value(psi) + 1e-12 * scale);
  CHECK(value(parse("2.5*tanh(x)")) == doctest::Approx(2.5 * value(phi)).epsilon(1e-12));
  CHECK(value(parse("3")) == 3.0);
  // monotone: tanh(x) <= tanh(x) + 0.2
  CHECK(value(phi) <= value(parse("tanh(x) + 0.2")) + 1e-15);
  CHECK(value(parse("tanh(x) + 0.2")) == doctest::Approx(value(phi) + 0.2).epsilon(1e-12));
}

TEST_CASE("fixed scenarios are dominated; the argmax scenario attains the value") {
  const GParams p{0.8, 1.2};
  const double T = 1.0;
  const int N = 80;
  const ExprPtr phi = parse("tanh(x) + 0.3*x^2 - 0.2*cos(x)");  // mixed convexity

  const ArgmaxScenario arg = conditional_field_with_argmax(p, phi, T, N);
  const double g_value = arg.field.value(0, 0);

  // time-only scenarios are dominated
  for (const double gamma : {p.gamma_lo(), p.gamma_hi(), 0.5 * (p.gamma_lo() + p.gamma_hi())}) {
    const LatticeField fixed =
        scenario_field(p, phi, T, N, [gamma](int, double) { return gamma; });
    CHECK(fixed.value(0, 0) <= g_value + 1e-12);
  }
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> per_level(static_cast<std::size_t>(N));
    for (auto& g : per_level) {
      g = p.gamma_lo() + (p.gamma_hi() - p.gamma_lo()) * rng.next_uniform();
    }
    const LatticeField fixed = scenario_field(
        p, phi, T, N, [&per_level](int k, double) { return per_level[k]; });
    CHECK(fixed.value(0, 0) <= g_value + 1e-12);
  }

  // the recorded per-node argmax replays the G-value bitwise
  const LatticeField replay = scenario_field(p, phi, T, N, arg.as_node_scenario());
  CHECK(replay.value(0, 0) == g_value);

  // scenarios outside the admissible interval are rejected
  CHECK_THROWS_AS(scenario_field(p, phi, T, N, [](int, double) { return 2.0; }), ConfigError);
}

TEST_CASE("classical reduction collapses to a plain trinomial expectation") {
  const GParams classical{1.0, 1.0};
  const int N = 200;
  CHECK(std::fabs(g_expectation(classical, parse("x^2"), 1.0, N) - 1.0) <= 1.0 / N);
  // sigma_lo == sigma_hi makes the sup trivial: both moment signs agree
  CHECK(g_expectation(classical, parse("x^2"), 1.0, N) ==
        doctest::Approx(-g_expectation(classical, parse("-x^2"), 1.0, N)).epsilon(1e-12));
}
