#include <doctest.h>

#include "gfbsde/g_function.hpp"
#include "gfbsde/rng.hpp"

using namespace gfbsde;

TEST_CASE("g_eval matches the closed interval form") {
  const GParams p{0.8, 1.2};
  CHECK(g_eval(p, 2.0) == doctest::Approx(1.44).epsilon(1e-15));
  CHECK(g_eval(p, 0.0) == 0.0);
  CHECK(g_eval(p, -1.0) == doctest::Approx(-0.32).epsilon(1e-15));
}

TEST_CASE("g_argmax selects the attaining volatility") {
  const GParams p{0.8, 1.2};
  CHECK(g_argmax(p, 3.0) == doctest::Approx(1.44));
  CHECK(g_argmax(p, -3.0) == doctest::Approx(0.64));
  // tie-break at zero resolves to the upper scenario
  CHECK(g_argmax(p, 0.0) == doctest::Approx(1.44));
}

TEST_CASE("GParams invariants") {
  CHECK_THROWS_AS(GParams{0.0, 1.0}.validate(), ConfigError);
  CHECK_THROWS_AS(GParams{1.2, 0.8}.validate(), ConfigError);
  CHECK_THROWS_AS(GParams{-1.0, 1.0}.validate(), ConfigError);
  CHECK_NOTHROW(GParams{1.0, 1.0}.validate());
}

TEST_CASE("g function properties on random draws") {
  const GParams p{0.7, 1.5};
  Rng rng(12345);
  for (int i = 0; i < 20000; ++i) {
    const double a = 40.0 * rng.next_uniform() - 20.0;
    const double b = 40.0 * rng.next_uniform() - 20.0;
    const double lam = 5.0 * rng.next_uniform();
    const double scale = 1.0 + std::fabs(a) + std::fabs(b);

    // maximizer consistency is exact
    CHECK(0.5 * g_argmax(p, a) * a == g_eval(p, a));

    // monotonicity gap: G(a) - G(b) >= gamma_lo/2 (a - b) for a >= b
    const double hi = std::max(a, b), lo = std::min(a, b);
    CHECK(g_eval(p, hi) - g_eval(p, lo) >= 0.5 * p.gamma_lo() * (hi - lo) - 1e-13 * scale);

    // sub-additivity and positive homogeneity
    CHECK(g_eval(p, a + b) <= g_eval(p, a) + g_eval(p, b) + 1e-13 * scale);
    CHECK(g_eval(p, lam * a) == doctest::Approx(lam * g_eval(p, a)).epsilon(1e-13));
  }
}

TEST_CASE("g_eval equals the sup over the scenario interval") {
  const GParams p{0.8, 1.2};
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const double a = 10.0 * rng.next_uniform() - 5.0;
    double sup = -1e300;
    for (int k = 0; k <= 50; ++k) {
      const double gamma = p.gamma_lo() + (p.gamma_hi() - p.gamma_lo()) * k / 50.0;
      sup = std::max(sup, 0.5 * gamma * a);
    }
    CHECK(g_eval(p, a) == doctest::Approx(sup).epsilon(1e-14));
  }
}
