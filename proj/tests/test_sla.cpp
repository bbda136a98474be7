#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mcbeam/acr_bb.hpp"
#include "mcbeam/sla.hpp"

using namespace mcbeam;
using Catch::Approx;

TEST_CASE("initial point is feasible and deterministic") {
  const Problem p = generate_instance(2, 4, 31);
  const Beamformer one = sla_init(p, 1, 5);
  REQUIRE(feasibility_margin(p, one) >= -1e-9);
  const Beamformer a = sla_init(p, 50, 5);
  const Beamformer b = sla_init(p, 50, 5);
  REQUIRE((a - b).norm() == 0.0);
}

TEST_CASE("a larger candidate budget never hurts") {
  const Problem p = generate_instance(3, 5, 77);
  const double best10 = objective(sla_init(p, 10, 9));
  const double best100 = objective(sla_init(p, 100, 9));
  const double best1000 = objective(sla_init(p, 1000, 9));
  REQUIRE(best100 <= best10 + 1e-12);   // candidates 0..9 are shared
  REQUIRE(best1000 <= best100 + 1e-12);
  REQUIRE_THROWS_AS(sla_init(p, 0, 1), std::invalid_argument);
}

TEST_CASE("an exactly optimal state is a fixed point") {
  Problem p;
  p.n = 1;
  p.m = 1;
  p.channels = Eigen::MatrixXcd::Constant(1, 1, 1.0);
  Beamformer w(1);
  w << 1.0;
  const SlaState next = sla_step(p, make_sla_state(p, w));
  REQUIRE(std::abs(next.w[0] - w[0]) < 1e-8);
  REQUIRE(next.objective == Approx(1.0).margin(1e-8));
}

TEST_CASE("scalar problem converges to the boundary") {
  Problem p;
  p.n = 1;
  p.m = 1;
  p.channels = Eigen::MatrixXcd::Constant(1, 1, 1.0);
  Beamformer w0(1);
  w0 << 2.0;
  std::vector<SlaState> trace;
  const Beamformer w = sla_solve(p, w0, {}, &trace);
  REQUIRE(objective(w) == Approx(1.0).margin(1e-5));
  REQUIRE(trace.size() >= 3);
  for (std::size_t i = 1; i < trace.size(); ++i)
    REQUIRE(trace[i].objective <= trace[i - 1].objective + 1e-9);
}

TEST_CASE("iterates stay feasible and the objective never increases") {
  for (const std::uint64_t seed : {11ull, 12ull, 13ull}) {
    const Problem p = generate_instance(2, 5, seed);
    std::vector<SlaState> trace;
    const Beamformer w = sla_solve(p, sla_init(p, 200, seed), {}, &trace);
    REQUIRE(feasibility_margin(p, w) >= -1e-8);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      REQUIRE(feasibility_margin(p, trace[i].w) >= -1e-8);
      if (i > 0) REQUIRE(trace[i].objective <= trace[i - 1].objective + 1e-9);
    }
    REQUIRE(objective(w) <= trace.front().objective + 1e-9);
  }
}

TEST_CASE("the local method cannot beat the certified global value") {
  for (const std::uint64_t seed : {21ull, 22ull}) {
    const Problem p = generate_instance(2, 3, seed);
    const BbResult global = solve_global(p, 1e-8);
    REQUIRE(global.status == BbStatus::Converged);
    const double local = objective(sla_solve(p, sla_init(p, 500, seed)));
    REQUIRE(local >= global.u_star - 1e-6);
  }
}

TEST_CASE("a global optimum is left essentially unchanged") {
  const Problem p = generate_instance(2, 3, 41);
  const BbResult global = solve_global(p, 1e-9);
  const double before = global.u_star;
  const double after = objective(sla_solve(p, global.w_star));
  REQUIRE(after == Approx(before).margin(1e-6));
  REQUIRE(after <= before + 1e-9);
}

TEST_CASE("infeasible starts are rejected") {
  const Problem p = generate_instance(2, 3, 51);
  REQUIRE_THROWS_AS(sla_solve(p, Beamformer::Zero(2)), std::invalid_argument);
}
