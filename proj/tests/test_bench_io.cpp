#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mcbeam/bench.hpp"
#include "mcbeam/json_io.hpp"

using namespace mcbeam;
using Catch::Approx;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("instance JSON round trip is bit exact") {
  const Problem p = generate_instance(3, 5, 4242);
  const nlohmann::json j = instance_to_json(to_raw(p));
  const RawInstance back = instance_from_json(j);
  REQUIRE(back.n == 3);
  REQUIRE(back.m == 5);
  REQUIRE(back.channels == p.channels);
  REQUIRE(back.seed.has_value());
  REQUIRE(*back.seed == 4242);

  // through text as well, not just the DOM
  const std::string text = j.dump();
  const RawInstance back2 = instance_from_json(nlohmann::json::parse(text));
  REQUIRE(back2.channels == p.channels);
}

TEST_CASE("instance JSON validation") {
  nlohmann::json j;
  j["n"] = 2;
  j["m"] = 1;
  j["channels"] = {{{1.0, 0.0}}};  // one entry, should be two
  REQUIRE_THROWS(instance_from_json(j));
  j["channels"] = {{{1.0, 0.0}, {0.0, 1.0}}};
  REQUIRE_NOTHROW(instance_from_json(j));  // gamma, sigma2 default to ones
  j["gamma"] = {-1.0};
  REQUIRE_THROWS_AS(instance_from_json(j), std::invalid_argument);
}

TEST_CASE("solve result JSON carries the trace identities") {
  const Problem p = generate_instance(2, 3, 7);
  const double eps = 1e-3;
  const BbResult r = solve_global(p, eps);
  const nlohmann::json j = bb_result_to_json(r, eps);
  REQUIRE(j["status"] == "converged");
  REQUIRE(j["iterations"].get<std::int64_t>() == r.iterations);
  const auto& rows = j["trace"];
  REQUIRE(static_cast<std::size_t>(rows.size()) == r.trace.size());
  const double nu = r.u_star;
  for (const auto& row : rows) {
    const double lower = row["lower"].get<double>();
    const double upper = row["upper"].get<double>();
    REQUIRE(row["e1"].get<double>() == Approx(std::abs(lower - nu) / nu).margin(1e-15));
    REQUIRE(row["e2"].get<double>() == Approx(std::abs(upper - nu) / nu).margin(1e-15));
    REQUIRE(row["e3"].get<double>() == Approx((upper - lower) / lower).margin(1e-15));
  }
  REQUIRE(rows[rows.size() - 1]["e3"].get<double>() <= eps);
}

TEST_CASE("benchmark report is self-consistent and reproducible") {
  BenchConfig cfg;
  cfg.n = 2;
  cfg.m = 3;
  cfg.count = 3;
  cfg.seed = 900;
  cfg.eps = 1e-3;
  cfg.samples = 100;
  cfg.solvers = {SolverKind::AcrBb, SolverKind::Sla};
  const RunReport rep = run_benchmark(cfg);
  REQUIRE(rep.rows.size() == 6);  // two solvers x three instances
  REQUIRE(rep.aggregates.size() == 2);
  REQUIRE(rep.bb_results.size() == 3);

  for (const InstanceRow& row : rep.rows) {
    if (row.solver == "acr-bb") {
      REQUIRE(row.status == "converged");
      REQUIRE(row.relative_gap_vs_bb == 0.0);
    } else {
      REQUIRE(row.relative_gap_vs_bb >= -1e-6);
    }
  }

  // determinism of everything except wall times
  const RunReport rep2 = run_benchmark(cfg);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    REQUIRE(rep.rows[i].solver == rep2.rows[i].solver);
    REQUIRE(rep.rows[i].objective == rep2.rows[i].objective);
    REQUIRE(rep.rows[i].iterations == rep2.rows[i].iterations);
  }

  // CSV: header + rows, and aggregates equal the recomputed statistics
  std::stringstream out;
  write_csv(out, rep);
  std::string line;
  REQUIRE(std::getline(out, line));
  const std::vector<std::string> header = split_csv_line(line);
  REQUIRE(header.size() == 18);
  REQUIRE(header[0] == "row_type");

  std::map<std::string, std::vector<double>> gaps, iters;
  std::map<std::string, std::map<std::string, double>> agg;
  while (std::getline(out, line)) {
    const auto cells = split_csv_line(line);
    REQUIRE(cells.size() >= 11);
    if (cells[0] == "instance") {
      iters[cells[5]].push_back(std::stod(cells[7]));
      gaps[cells[5]].push_back(std::stod(cells[10]));
    } else {
      REQUIRE(cells[0] == "aggregate");
      agg[cells[5]]["mean_iterations"] = std::stod(cells[11]);
      agg[cells[5]]["worst_iterations"] = std::stod(cells[12]);
      agg[cells[5]]["mean_relative_gap"] = std::stod(cells[15]);
      agg[cells[5]]["probability_of_global"] = std::stod(cells[17]);
    }
  }
  for (const auto& [solver, values] : iters) {
    double mean = 0.0, worst = 0.0;
    for (const double v : values) {
      mean += v;
      worst = std::max(worst, v);
    }
    mean /= static_cast<double>(values.size());
    REQUIRE(agg[solver]["mean_iterations"] == Approx(mean).margin(1e-12));
    REQUIRE(agg[solver]["worst_iterations"] == Approx(worst).margin(1e-12));
  }
  for (const auto& [solver, values] : gaps) {
    double mean = 0.0;
    int global = 0;
    for (const double v : values) {
      mean += v;
      if (v <= 1e-3) ++global;
    }
    mean /= static_cast<double>(values.size());
    REQUIRE(agg[solver]["mean_relative_gap"] == Approx(mean).margin(1e-12));
    REQUIRE(agg[solver]["probability_of_global"] ==
            Approx(static_cast<double>(global) / values.size()).margin(1e-12));
  }
}

TEST_CASE("a one-instance benchmark matches a direct solve") {
  BenchConfig cfg;
  cfg.n = 2;
  cfg.m = 3;
  cfg.count = 1;
  cfg.seed = 321;
  cfg.eps = 1e-3;
  cfg.solvers = {SolverKind::AcrBb};
  const RunReport rep = run_benchmark(cfg);
  const BbResult direct = solve_global(generate_instance(2, 3, 321), 1e-3);
  REQUIRE(rep.rows.size() == 1);
  REQUIRE(rep.rows[0].objective == direct.u_star);
  REQUIRE(rep.rows[0].iterations == direct.iterations);
}
