#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "mcbeam/acr_bb.hpp"
#include "mcbeam/reference_case.hpp"
#include "mcbeam/sdr.hpp"

using namespace mcbeam;
using Catch::Approx;

TEST_CASE("single-user relaxation has the rank-one closed form") {
  const Problem p = generate_instance(3, 1, 4);
  const Eigen::VectorXcd h = p.channel(0);
  const double n2 = h.squaredNorm();
  const SdpSolution sol = solve_sdr(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  REQUIRE(sol.value == Approx(1.0 / n2).margin(1e-6));
  REQUIRE(sol.duality_gap <= 1e-7);
  REQUIRE(rank_one_ratio(sol.W) <= 1e-6);
  const Eigen::MatrixXcd expected = h * h.adjoint() / (n2 * n2);
  REQUIRE((sol.W - expected).norm() < 1e-5);

  const Beamformer w = gaussian_randomization(p, sol, 10, 1);
  REQUIRE(objective(w) == Approx(1.0 / n2).epsilon(1e-6));
  REQUIRE(feasibility_margin(p, w) >= -1e-9);
  // rank-one exactness: the randomized value matches the relaxation value
  REQUIRE(std::abs(objective(w) - sol.value) < 1e-6);
}

TEST_CASE("relaxation certificate on random instances") {
  for (const std::uint64_t seed : {61ull, 62ull, 63ull}) {
    const Problem p = generate_instance(2, 6, seed);
    const SdpSolution sol = solve_sdr(p);
    REQUIRE(sol.status == SdpStatus::Optimal);
    REQUIRE(sol.duality_gap <= 1e-7);
    REQUIRE(sol.duality_gap >= -1e-12);  // weak duality, exact dual feasibility
    // PSD floor and constraint margins of the returned matrix
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sol.W, Eigen::EigenvaluesOnly);
    REQUIRE(es.eigenvalues().minCoeff() >= -1e-8);
    for (int k = 0; k < p.m; ++k)
      REQUIRE(std::real(p.channel(k).dot(sol.W * p.channel(k))) >= 1.0 - 1e-9);
    REQUIRE(sol.value == Approx(sol.W.real().trace()).margin(1e-12));
  }
}

TEST_CASE("relaxation value lower-bounds the certified optimum") {
  for (const std::uint64_t seed : {71ull, 72ull}) {
    const Problem p = generate_instance(2, 3, seed);
    const SdpSolution sol = solve_sdr(p);
    const BbResult global = solve_global(p, 1e-6);
    REQUIRE(sol.value <= global.u_star + 1e-6);
    const Beamformer w = gaussian_randomization(p, sol, 1000, seed);
    REQUIRE(feasibility_margin(p, w) >= -1e-9);
    REQUIRE(objective(w) >= sol.value - 1e-9);  // relaxation under feasible point
    REQUIRE(objective(w) >= global.u_star - 1e-6);
  }
}

TEST_CASE("reference instance relaxation stays below the known optimum") {
  const SdpSolution sol = solve_sdr(reference_instance());
  REQUIRE(sol.status == SdpStatus::Optimal);
  REQUIRE(sol.value <= 0.5072 + 5e-4);
}

TEST_CASE("rank-one ratio") {
  Eigen::VectorXcd v(2);
  v << std::complex<double>(1.0, 2.0), std::complex<double>(-0.5, 0.3);
  REQUIRE(rank_one_ratio(v * v.adjoint()) == Approx(0.0).margin(1e-12));
  REQUIRE(rank_one_ratio(Eigen::MatrixXcd::Identity(2, 2)) == Approx(1.0));
  // constructed spectrum (4, 1)
  Eigen::MatrixXcd q(2, 2);
  q << std::complex<double>(std::sqrt(0.5), 0.0), std::complex<double>(0.0, std::sqrt(0.5)),
      std::complex<double>(0.0, std::sqrt(0.5)), std::complex<double>(std::sqrt(0.5), 0.0);
  Eigen::VectorXd eig(2);
  eig << 4.0, 1.0;
  const Eigen::MatrixXcd w = q * eig.asDiagonal() * q.adjoint();
  REQUIRE(rank_one_ratio(w) == Approx(0.25).margin(1e-12));
  REQUIRE_THROWS_AS(rank_one_ratio(Eigen::MatrixXcd::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("randomization is deterministic and always feasible") {
  const Problem p = generate_instance(3, 8, 81);
  const SdpSolution sol = solve_sdr(p);
  const Beamformer a = gaussian_randomization(p, sol, 200, 3);
  const Beamformer b = gaussian_randomization(p, sol, 200, 3);
  REQUIRE((a - b).norm() == 0.0);
  REQUIRE(feasibility_margin(p, a) >= -1e-9);
  REQUIRE_THROWS_AS(gaussian_randomization(p, sol, 0, 3), std::invalid_argument);
}
