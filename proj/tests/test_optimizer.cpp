#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "bellbound/angle_expression.hpp"
#include "bellbound/optimizer.hpp"
#include "test_support.hpp"

using namespace bellbound;
using namespace bellbound::testing;

namespace {

SearchParameters main_point() {
  return {kMainAngles.alpha, kMainAngles.beta, kMainAngles.gamma, kMainTheta.theta1, kMainTheta.theta2};
}

}  // namespace

TEST_CASE("SplitMix64") {
  // Reference outputs of the published SplitMix64 generator for seed 0.
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
  CHECK(rng.next() == 0x06C45D188009454Full);

  SplitMix64 u(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("objective") {
  const auto p = objective(main_point());
  REQUIRE(p.feasible);
  CHECK(std::abs(p.s_value - 3.0069) <= 1e-3);
  CHECK(p.branch == 0);
  CHECK(std::abs(p.omega - 0.5682) <= 1e-3);

  const auto app = objective({kAppendixAngles.alpha, kAppendixAngles.beta, kAppendixAngles.gamma,
                              kAppendixTheta.theta1, kAppendixTheta.theta2});
  CHECK(std::abs(app.s_value - 3.0187) <= 1e-3);

  const auto bad = objective({kInfeasibleAngles.alpha, kInfeasibleAngles.beta, kInfeasibleAngles.gamma, 0, 0});
  CHECK_FALSE(bad.feasible);
  CHECK(bad.s_value == -std::numeric_limits<double>::infinity());

  const auto nan = objective({std::nan(""), 0, 0, 0, 0});
  CHECK_FALSE(nan.feasible);
}

TEST_CASE("maximize") {
  MaximizeConfig cfg;
  cfg.starts = 6;

  SUBCASE("deterministic for a seed, independent of thread count") {
    const auto a = maximize(cfg, 7);
    const auto b = maximize(cfg, 7);
    cfg.threads = 3;
    const auto c = maximize(cfg, 7);
    CHECK(a.best.parameters == b.best.parameters);
    CHECK(a.best.s_value == b.best.s_value);
    CHECK(a.best.parameters == c.best.parameters);
    REQUIRE(a.history.size() == 6);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      CHECK(a.history[i].start_index == static_cast<int>(i));
      CHECK(a.history[i].start == c.history[i].start);
      CHECK(a.history[i].trace.size() == c.history[i].trace.size());
    }
  }

  SUBCASE("trace is monotone and the result is sound") {
    const auto r = maximize(cfg, 3);
    for (const auto& h : r.history) {
      for (std::size_t k = 1; k < h.trace.size(); ++k) CHECK(h.trace[k].best_s >= h.trace[k - 1].best_s);
      CHECK(static_cast<int>(h.trace.size()) <= cfg.max_iterations);
      if (h.start_feasible) CHECK(h.result.s_value >= h.trace.front().best_s - 1e-12);
    }
    const auto again = objective(r.best.parameters);
    CHECK(again.feasible);
    CHECK(again.s_value == r.best.s_value);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(r.best.parameters[i] >= 0.0);
      CHECK(r.best.parameters[i] < 2 * kPi);
    }
    for (std::size_t i = 3; i < 5; ++i) {
      CHECK(r.best.parameters[i] >= -kPi);
      CHECK(r.best.parameters[i] < kPi);
    }
    CHECK(certify(assemble_state(family_angles(r.best.parameters), r.best.omega)).passed());
    for (const auto& h : r.history)
      if (h.result.feasible) CHECK(r.best.s_value >= h.result.s_value);
  }

  SUBCASE("zero radius around the main-text point") {
    MaximizeConfig fixed;
    fixed.starts = 3;
    fixed.center = main_point();
    fixed.radius = 0.0;
    const auto r = maximize(fixed, 1);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(r.best.parameters[i] - main_point()[i]) <= 1e-15);
    CHECK(std::abs(r.best.s_value - 3.0069) <= 1e-3);
    CHECK(std::abs(r.best.s_value - objective(main_point()).s_value) <= 1e-14);
  }

  SUBCASE("zero radius in an infeasible region") {
    MaximizeConfig fixed;
    fixed.starts = 1;
    fixed.center = SearchParameters{kInfeasibleAngles.alpha, kInfeasibleAngles.beta, kInfeasibleAngles.gamma, 0, 0};
    fixed.radius = 0.0;
    CHECK_THROWS_AS(maximize(fixed, 1), NoFeasiblePoint);
  }

  SUBCASE("invalid configuration") {
    MaximizeConfig bad;
    bad.starts = 0;
    CHECK_THROWS_AS(maximize(bad, 1), std::invalid_argument);
  }
}

TEST_CASE("coarse grid search does not beat the optimizer") {
  // Independent check of the optimum: a plain 5-D grid of the objective.
  const int n = 7;
  double grid_best = -1e300;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) {
            const SearchParameters x{2 * kPi * i / n, 2 * kPi * j / n, 2 * kPi * k / n, -kPi + 2 * kPi * l / n,
                                     -kPi + 2 * kPi * m / n};
            const auto p = objective(x);
            if (p.feasible) grid_best = std::max(grid_best, p.s_value);
          }
  MaximizeConfig cfg;
  cfg.starts = 20;
  const auto r = maximize(cfg, 1);
  CHECK(grid_best > 2.0);
  CHECK(grid_best <= r.best.s_value + 1e-9);
  CHECK(r.best.s_value <= 3.0187 + 1e-3);
}

TEST_CASE("parse_grid") {
  const auto g = parse_grid("0:pi:3,pi/4:pi/4:1,0:2*pi:5");
  CHECK(g.alpha.count == 3);
  CHECK(g.alpha.at(2) == doctest::Approx(kPi));
  CHECK(g.beta.at(0) == doctest::Approx(kPi / 4));
  CHECK(g.gamma.at(1) == doctest::Approx(kPi / 2));

  CHECK_THROWS_AS(parse_grid("0:1:2,0:1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1:2,0:1:2,0:1:2,0:1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1:0,0:1:2,0:1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1,0:1:2,0:1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:x:2,0:1:2,0:1:2"), std::invalid_argument);
}

TEST_CASE("scan") {
  SUBCASE("grid through the main-text point") {
    ScanGrid g;
    g.alpha = {0, kPi / 6, 3};
    g.beta = {kPi / 4, kPi / 4, 1};
    g.gamma = {5 * kPi / 12, 5 * kPi / 12, 1};
    const auto rows = scan(g);
    REQUIRE(rows.size() == 3);
    const auto& mid = rows[1];
    CHECK(mid.angles.alpha == doctest::Approx(kPi / 12));
    CHECK(mid.feasible);
    CHECK(mid.certified);
    CHECK(mid.valid_branches == 2);
    CHECK(mid.discriminant > 0);
  }

  SUBCASE("A vanishes at beta = gamma = pi/2") {
    ScanGrid g;
    g.alpha = {0.3, 0.3, 1};
    g.beta = {kPi / 2, kPi / 2, 1};
    g.gamma = {kPi / 2, kPi / 2, 1};
    const auto rows = scan(g);
    REQUIRE(rows.size() == 1);
    CHECK(std::abs(rows[0].abc.a) <= 1e-15);
  }

  SUBCASE("feasible region is a proper subset") {
    const auto rows = scan(parse_grid("0:2*pi:7,0:2*pi:7,0:2*pi:7"));
    CHECK(rows.size() == 343);
    std::size_t feasible = 0, negative_d = 0;
    for (const auto& r : rows) {
      feasible += r.feasible;
      negative_d += r.discriminant < 0;
      if (r.feasible) CHECK(r.valid_branches >= 1);
      if (r.discriminant < 0) CHECK_FALSE(r.feasible);
    }
    CHECK(feasible > 0);
    CHECK(feasible < rows.size());
    CHECK(negative_d > 0);
  }

  SUBCASE("theta sweep records a Bell value") {
    ScanGrid g;
    g.alpha = {kPi / 12, kPi / 12, 1};
    g.beta = {kPi / 4, kPi / 4, 1};
    g.gamma = {5 * kPi / 12, 5 * kPi / 12, 1};
    g.theta_steps = 18;
    const auto rows = scan(g);
    REQUIRE(rows[0].best_s.has_value());
    // The reported angles lie on this 20-degree grid.
    CHECK(*rows[0].best_s >= 3.0069 - 1e-3);
  }
}

TEST_CASE("parse_angle_expression") {
  CHECK(parse_angle_expression("0.1545") == 0.1545);
  CHECK(parse_angle_expression("pi/12") == doctest::Approx(kPi / 12).epsilon(1e-15));
  CHECK(parse_angle_expression("5*pi/12") == doctest::Approx(5 * kPi / 12).epsilon(1e-15));
  CHECK(parse_angle_expression("5pi/12") == doctest::Approx(5 * kPi / 12).epsilon(1e-15));
  CHECK(parse_angle_expression("-4*pi/9") == doctest::Approx(-4 * kPi / 9).epsilon(1e-15));
  CHECK(parse_angle_expression(" ( pi + 1 ) / 2 ") == doctest::Approx((kPi + 1) / 2));
  CHECK(parse_angle_expression("1e-3") == 1e-3);
  CHECK(parse_angle_expression("2-3-4") == -5.0);
  CHECK(parse_angle_expression("--1") == 1.0);
  CHECK_THROWS_AS(parse_angle_expression(""), AngleParseError);
  CHECK_THROWS_AS(parse_angle_expression("pi/"), AngleParseError);
  CHECK_THROWS_AS(parse_angle_expression("1/0"), AngleParseError);
  CHECK_THROWS_AS(parse_angle_expression("sin(1)"), AngleParseError);
  CHECK_THROWS_AS(parse_angle_expression("(1"), AngleParseError);
  try {
    parse_angle_expression("1 + x");
  } catch (const AngleParseError& e) {
    CHECK(e.position() == 4);
  }
}
