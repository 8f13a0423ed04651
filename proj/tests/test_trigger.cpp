#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "etc/errors.hpp"
#include "etc/trigger.hpp"
#include "oracles.hpp"

using namespace etc;

namespace {

// Scalar certificate: V = x^2, W = |e|, H = |x|, delta(y) = y^2, alpha(s) = s^2.
Certificate scalar_cert(double gamma, double L) {
  Certificate c;
  c.name = "scalar";
  c.n_x = c.n_e = c.n_y = 1;
  c.V = [](std::span<const double> x) { return x[0] * x[0]; };
  c.W = [](std::span<const double> e) { return std::abs(e[0]); };
  c.H = [](std::span<const double> x) { return std::abs(x[0]); };
  c.delta = [](std::span<const double> y) { return y[0] * y[0]; };
  c.alpha = [](double s) { return s * s; };
  c.alpha_lower = [](double s) { return s * s; };
  c.alpha_upper = [](double s) { return s * s; };
  c.output = [](std::span<const double> x) { return Vector(x.begin(), x.end()); };
  c.gamma = gamma;
  c.L = L;
  return c;
}

HybridState state(double x, double e, double tau) { return HybridState{{x}, {e}, tau}; }

}  // namespace

TEST_CASE("masp branches") {
  CHECK(masp(2.0, 2.0) == 0.5);
  CHECK(std::abs(masp(17.3495, 4.1231) - 0.0790) <= 5e-4);
  CHECK(std::abs(masp(std::sqrt(1000.0 / 3.0), 0.0) - 0.08603) <= 1e-4);
  CHECK(std::abs(masp(1.0, 2.0) - 0.7603) <= 1e-4);
  CHECK(masp(3.0, 0.0) == doctest::Approx(std::numbers::pi / 6.0).epsilon(1e-15));
  CHECK(std::isinf(masp(0.0, 1.0)));
  CHECK_THROWS_AS(masp(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(masp(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(masp(1.0, -1.0), DomainError);
}

TEST_CASE("masp equals 1/L on the seam and is continuous across it") {
  for (double L : {0.5, 1.0, 2.0, 4.1231}) {
    CHECK(masp(L, L) == 1.0 / L);
    CHECK(std::abs(masp(L * (1 + 1e-6), L) - 1.0 / L) <= 1e-4);
    CHECK(std::abs(masp(L * (1 - 1e-6), L) - 1.0 / L) <= 1e-4);
  }
}

TEST_CASE("masp against the closed-form zeta transit in the limit") {
  // theta -> 0 and eta = 0 in the transit formula gives the bound itself
  for (auto [g, L] : {std::pair{17.3495, 4.1231}, std::pair{1.0, 2.0}, std::pair{3.0, 3.0}, std::pair{5.0, 0.0}})
    CHECK(masp(g, L) == doctest::Approx(oracle::zeta_transit(L, g, 1e-9)).epsilon(1e-6));
}

TEST_CASE("property: masp is nonincreasing in gamma and in L") {
  const double grid[] = {0.1, 0.5, 1.0, 2.0, 4.1231, 10.0, 17.3495, 90.0};
  for (double g : grid)
    for (std::size_t i = 0; i + 1 < std::size(grid); ++i) {
      CHECK(masp(g, grid[i + 1]) <= masp(g, grid[i]));
      CHECK(masp(grid[i + 1], g) <= masp(grid[i], g));
    }
}

TEST_CASE("ZetaParams") {
  const ZetaParams zp = ZetaParams::make(0.1, 0.01, 3.0);
  CHECK(std::abs(zp.lambda * zp.lambda - (9.0 + 0.01)) <= 1e-12);
  CHECK_THROWS_AS(ZetaParams::make(0.0, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(ZetaParams::make(1.0, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(ZetaParams::make(0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("zeta_time against the closed-form transit time") {
  for (auto [g, L] : {std::pair{17.3495, 4.1231}, std::pair{1.0, 2.0}, std::pair{2.0, 2.0}, std::pair{18.2574, 0.0}})
    for (double theta : {0.01, 0.1, 0.5})
      for (double eta : {0.01, 0.1}) {
        const ZetaParams zp = ZetaParams::make(theta, eta, g);
        const double ref = oracle::zeta_transit(L, zp.lambda, theta);
        CHECK(zeta_time(g, L, zp, 1e-4) == doctest::Approx(ref).epsilon(1e-6));
      }
}

TEST_CASE("zeta_time limits and ordering") {
  const double g = 17.3495, L = 4.1231;
  CHECK(zeta_time(g, L, ZetaParams::make(0.999999, 1e-6, g), 1e-4) < 1e-6);
  CHECK(zeta_time(g, L, ZetaParams::make(0.01, 0.01, g), 1e-4) < masp(g, L));
  CHECK(std::abs(zeta_time(g, L, ZetaParams::make(1e-4, 1e-6, g), 1e-5) - masp(g, L)) <= 1e-3);
}

TEST_CASE("property: zeta_time decreases in theta and in eta") {
  const double g = 17.3495, L = 4.1231;
  const double grid[] = {0.01, 0.1, 0.5};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k + 1 < 3; ++k) {
      CHECK(zeta_time(g, L, ZetaParams::make(grid[k + 1], grid[i], g), 1e-4) <
            zeta_time(g, L, ZetaParams::make(grid[k], grid[i], g), 1e-4));
      CHECK(zeta_time(g, L, ZetaParams::make(grid[i], grid[k + 1], g), 1e-4) <
            zeta_time(g, L, ZetaParams::make(grid[i], grid[k], g), 1e-4));
    }
}

TEST_CASE("ZetaFlow tracks the closed-form solution through the escape") {
  const double L = 1.0, lambda = 2.0;
  ZetaFlow z(L, lambda, 10.0);
  // zeta = w - L/lambda with w = k tan(atan(w0/k) - lambda k t), k^2 = 1 - (L/lambda)^2
  const double k = std::sqrt(1.0 - 0.25);
  const double w0 = 10.0 + 0.5;
  for (double t : {0.1, 0.3, 0.6}) {
    z.advance_to(t, 1e-4);
    const double ref = k * std::tan(std::atan(w0 / k) - lambda * k * t) - 0.5;
    CHECK(z.value() == doctest::Approx(ref).epsilon(1e-8));
  }
  z.advance_to(10.0, 1e-3);
  CHECK(z.value() == -std::numeric_limits<double>::infinity());
}

TEST_CASE("trigger mode names") {
  for (auto m : {TriggerMode::OutputFeedback, TriggerMode::StateFeedback, TriggerMode::PureEvent, TriggerMode::Periodic})
    CHECK(parse_trigger_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_trigger_mode("sometimes"), ConfigError);
}

TEST_CASE("validate rejects inconsistent trigger configurations") {
  const Certificate c = scalar_cert(2.0, 2.0);  // masp 0.5
  CHECK_NOTHROW(validate(TriggerConfig{TriggerMode::OutputFeedback, 0.4, 0.5}, c));
  try {
    validate(TriggerConfig{TriggerMode::OutputFeedback, 0.5, 0.5}, c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find("dwell time exceeds MASP") != std::string::npos);
  }
  CHECK_THROWS_AS(validate(TriggerConfig{TriggerMode::Periodic, 0.0, 0.5}, c), ConfigError);
  CHECK_THROWS_AS(validate(TriggerConfig{TriggerMode::PureEvent, 0.1, 0.5}, c), ConfigError);
  CHECK_NOTHROW(validate(TriggerConfig{TriggerMode::PureEvent, 0.0, 0.5}, c));
  CHECK_THROWS_AS(validate(TriggerConfig{TriggerMode::StateFeedback, 0.1, 1.0}, c), ConfigError);
  CHECK_THROWS_AS(validate(TriggerConfig{TriggerMode::StateFeedback, 0.1, 0.0}, c), ConfigError);
  Certificate partial = c;
  partial.n_x = 2;
  CHECK_THROWS_AS(validate(TriggerConfig{TriggerMode::StateFeedback, 0.1, 0.5}, partial), ConfigError);
}

TEST_CASE("flow and jump sets, output feedback") {
  const Certificate c = scalar_cert(2.0, 2.0);
  const TriggerConfig cfg{TriggerMode::OutputFeedback, 0.3, 0.5};
  // gamma^2 W^2 = 4 e^2 against delta = x^2
  CHECK(in_flow(state(1.0, 5.0, 0.0), c, cfg));
  CHECK_FALSE(in_jump(state(1.0, 5.0, 0.1), c, cfg));
  CHECK(in_jump(state(1.0, 1.0, 0.3), c, cfg));
  CHECK_FALSE(in_flow(state(1.0, 1.0, 0.31), c, cfg));
  // the event surface belongs to both sets
  const HybridState edge = state(1.0, 0.5, 0.4);
  CHECK(event_value(edge, c, cfg) == 0.0);
  CHECK(in_flow(edge, c, cfg));
  CHECK(in_jump(edge, c, cfg));
  // equilibrium at tau = T
  CHECK(in_jump(state(0.0, 0.0, 0.3), c, cfg));
}

TEST_CASE("flow and jump sets, state feedback and pure event") {
  const Certificate c = scalar_cert(2.0, 2.0);
  const TriggerConfig sf{TriggerMode::StateFeedback, 0.3, 0.5};
  // threshold sigma (alpha + H^2 + delta) = 0.5 * 3 x^2
  CHECK(trigger_threshold(state(2.0, 0.0, 0.0), c, sf) == doctest::Approx(6.0));
  CHECK(event_value(state(2.0, 1.0, 0.0), c, sf) == doctest::Approx(4.0 - 6.0));
  const TriggerConfig pe{TriggerMode::PureEvent, 0.0, 0.5};
  CHECK(in_flow(state(1.0, 0.0, 5.0), c, pe));
  CHECK(in_jump(state(1.0, 1.0, 0.0), c, pe));
  const TriggerConfig per{TriggerMode::Periodic, 0.3, 0.5};
  CHECK(in_flow(state(1.0, 100.0, 0.2), c, per));
  CHECK(in_jump(state(0.0, 0.0, 0.3), c, per));
  CHECK_FALSE(in_jump(state(1.0, 100.0, 0.2), c, per));
}

TEST_CASE("property: flow and jump sets cover the state space") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  const Certificate c = scalar_cert(2.0, 1.0);
  for (auto mode : {TriggerMode::OutputFeedback, TriggerMode::StateFeedback, TriggerMode::PureEvent, TriggerMode::Periodic}) {
    const TriggerConfig cfg{mode, mode == TriggerMode::PureEvent ? 0.0 : 0.3, 0.5};
    for (int k = 0; k < 2000; ++k) {
      const HybridState q = state(u(rng), u(rng), t(rng));
      CHECK((in_flow(q, c, cfg) || in_jump(q, c, cfg)));
      if (mode != TriggerMode::PureEvent && q.tau < cfg.T) CHECK_FALSE(in_jump(q, c, cfg));
    }
    if (mode != TriggerMode::PureEvent) CHECK(in_flow(state(u(rng), u(rng), 0.0), c, cfg));
  }
}
