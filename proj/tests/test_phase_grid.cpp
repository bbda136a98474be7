#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mcbeam/acr_bb.hpp"
#include "mcbeam/phase_grid.hpp"
#include "mcbeam/reference_case.hpp"

using namespace mcbeam;
using Catch::Approx;

TEST_CASE("single user needs one QP and is exact") {
  const Problem p = generate_instance(2, 1, 5);
  const OracleResult o = phase_grid_value(p, 64);
  REQUIRE(o.qp_count == 1);
  const double expected = 1.0 / p.channel(0).squaredNorm();
  REQUIRE(o.upper == Approx(expected).epsilon(1e-8));
  const double c = std::cos(0.5 * o.grid_width);
  REQUIRE(o.lower == Approx(o.upper * c * c).epsilon(1e-12));
  REQUIRE(feasibility_margin(p, o.best_w) >= -1e-9);
}

TEST_CASE("nested grids refine the bracket monotonically") {
  const Problem p = generate_instance(2, 2, 15);
  double prev_upper = std::numeric_limits<double>::infinity();
  double prev_lower = 0.0;
  for (const int g : {8, 16, 32, 64}) {
    const OracleResult o = phase_grid_value(p, g);
    REQUIRE(o.upper <= prev_upper + 1e-12);
    REQUIRE(o.lower >= prev_lower - 1e-12);
    REQUIRE(o.lower <= o.upper);
    prev_upper = o.upper;
    prev_lower = o.lower;
  }
}

TEST_CASE("the certified interval brackets the branch-and-bound value") {
  for (const std::uint64_t seed : {91ull, 92ull}) {
    const Problem p = generate_instance(2, 3, seed);
    const BbResult global = solve_global(p, 1e-6);
    REQUIRE(global.status == BbStatus::Converged);
    const OracleResult o = phase_grid_value(p, 90);
    REQUIRE(global.u_star >= o.lower * (1.0 - 1e-9));
    REQUIRE(global.u_star <= o.upper * (1.0 + 2e-6));
    REQUIRE(std::abs(global.u_star - o.upper) / o.upper < 2e-3);
  }
}

TEST_CASE("reference instance bracket contains the known optimum") {
  const OracleResult o = phase_grid_value(reference_instance(), 120);
  REQUIRE(o.lower <= 0.5072);
  REQUIRE(o.upper >= 0.5072 - 5e-4);
  REQUIRE(feasibility_margin(reference_instance(), o.best_w) >= -1e-9);
}

TEST_CASE("grid cap") {
  const Problem p = generate_instance(2, 8, 3);
  REQUIRE_THROWS_AS(phase_grid_value(p, 100), std::invalid_argument);  // 100^7 QPs
  REQUIRE_THROWS_AS(phase_grid_value(p, 0), std::invalid_argument);
}
