// Command-line front end: instance generation and I/O, the global solver,
// the SLA / SDR baselines, the phase-grid oracle, a built-in regression
// fixture, and CSV benchmark reports.
//
// Exit codes: 0 ok, 1 input error, 2 iteration/time limit, 3 fixture
// mismatch.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcbeam/bench.hpp"
#include "mcbeam/json_io.hpp"
#include "mcbeam/phase_grid.hpp"
#include "mcbeam/reference_case.hpp"
#include "mcbeam/sdr.hpp"
#include "mcbeam/sla.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitLimit = 2;
constexpr int kExitFixture = 3;

void emit_json(const std::string& out_path, const nlohmann::json& j) {
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open " + out_path + " for writing");
  f << j.dump(2) << '\n';
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<mcbeam::SolverKind> parse_solvers(const std::string& csv) {
  std::vector<mcbeam::SolverKind> kinds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "acr-bb")
      kinds.push_back(mcbeam::SolverKind::AcrBb);
    else if (item == "sla")
      kinds.push_back(mcbeam::SolverKind::Sla);
    else if (item == "sdr")
      kinds.push_back(mcbeam::SolverKind::Sdr);
    else if (item == "oracle")
      kinds.push_back(mcbeam::SolverKind::Oracle);
    else
      throw std::invalid_argument("unknown solver '" + item + "'");
  }
  if (kinds.empty()) throw std::invalid_argument("no solvers requested");
  return kinds;
}

struct SolveArgs {
  std::string instance;
  double eps = 5e-3;
  std::int64_t max_iter = 1'000'000;
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::string out = "-";
};

int run_solve(const SolveArgs& a) {
  const mcbeam::Problem p = mcbeam::normalize(mcbeam::read_instance(a.instance));
  mcbeam::BbLimits limits;
  limits.max_iter = a.max_iter;
  limits.time_limit_s = a.time_limit_s;
  const auto t0 = std::chrono::steady_clock::now();
  const mcbeam::BbResult r = mcbeam::solve_global(p, a.eps, limits);
  nlohmann::json j = mcbeam::bb_result_to_json(r, a.eps);
  j["wall_time_s"] = seconds_since(t0);
  j["feasibility_margin"] =
      r.w_star.size() > 0 ? mcbeam::feasibility_margin(p, r.w_star)
                          : std::numeric_limits<double>::quiet_NaN();
  emit_json(a.out, j);
  return r.status == mcbeam::BbStatus::Converged ? kExitOk : kExitLimit;
}

struct BaselineArgs {
  std::string instance;
  std::string solver;
  std::uint64_t seed = 1;
  int samples = 1000;
  std::string out = "-";
};

int run_baseline(const BaselineArgs& a) {
  const mcbeam::Problem p = mcbeam::normalize(mcbeam::read_instance(a.instance));
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json j;
  j["solver"] = a.solver;
  int code = kExitOk;
  if (a.solver == "sla") {
    std::vector<mcbeam::SlaState> trace;
    const mcbeam::Beamformer w =
        mcbeam::sla_solve(p, mcbeam::sla_init(p, a.samples, a.seed), {}, &trace);
    j["objective"] = mcbeam::objective(w);
    j["iterations"] = trace.size() - 1;
    j["feasibility_margin"] = mcbeam::feasibility_margin(p, w);
    j["w"] = mcbeam::beamformer_to_json(w);
  } else {
    const mcbeam::SdpSolution sdp = mcbeam::solve_sdr(p);
    const mcbeam::Beamformer w = mcbeam::gaussian_randomization(p, sdp, a.samples, a.seed);
    j["objective"] = mcbeam::objective(w);
    j["sdp_value"] = sdp.value;
    j["duality_gap"] = sdp.duality_gap;
    j["rank_one_ratio"] = mcbeam::rank_one_ratio(sdp.W);
    j["iterations"] = sdp.iterations;
    j["feasibility_margin"] = mcbeam::feasibility_margin(p, w);
    j["w"] = mcbeam::beamformer_to_json(w);
    if (sdp.status != mcbeam::SdpStatus::Optimal) code = kExitLimit;
  }
  j["wall_time_s"] = seconds_since(t0);
  emit_json(a.out, j);
  return code;
}

struct BenchArgs {
  int n = 2, m = 8, count = 50;
  std::uint64_t seed = 1;
  double eps = 5e-3;
  int samples = 1000;
  int grid = 180;
  std::int64_t max_iter = 1'000'000;
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::string solvers = "acr-bb,sla,sdr";
  std::string out = "-";
  std::string dump_instances;
};

int run_bench(const BenchArgs& a) {
  mcbeam::BenchConfig cfg;
  cfg.n = a.n;
  cfg.m = a.m;
  cfg.count = a.count;
  cfg.seed = a.seed;
  cfg.eps = a.eps;
  cfg.samples = a.samples;
  cfg.grid = a.grid;
  cfg.limits.max_iter = a.max_iter;
  cfg.limits.time_limit_s = a.time_limit_s;
  cfg.solvers = parse_solvers(a.solvers);
  if (!a.dump_instances.empty()) {
    std::filesystem::create_directories(a.dump_instances);
    for (int i = 0; i < cfg.count; ++i) {
      const std::uint64_t seed_i = cfg.seed + static_cast<std::uint64_t>(i);
      const mcbeam::Problem p = mcbeam::generate_instance(cfg.n, cfg.m, seed_i);
      char name[96];
      std::snprintf(name, sizeof(name), "instance_%dx%d_seed%llu.json", cfg.n, cfg.m,
                    static_cast<unsigned long long>(seed_i));
      mcbeam::write_instance((std::filesystem::path(a.dump_instances) / name).string(),
                             mcbeam::to_raw(p));
    }
  }
  const mcbeam::RunReport rep = mcbeam::run_benchmark(cfg);
  if (a.out.empty() || a.out == "-") {
    mcbeam::write_csv(std::cout, rep);
  } else {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot open " + a.out + " for writing");
    mcbeam::write_csv(f, rep);
  }
  return kExitOk;
}

struct OracleArgs {
  std::string instance;
  int grid = 180;
  std::int64_t max_qps = 1'000'000;
  std::string out = "-";
};

int run_oracle(const OracleArgs& a) {
  const mcbeam::Problem p = mcbeam::normalize(mcbeam::read_instance(a.instance));
  const auto t0 = std::chrono::steady_clock::now();
  const mcbeam::OracleResult o = mcbeam::phase_grid_value(p, a.grid, a.max_qps);
  nlohmann::json j;
  j["upper"] = o.upper;
  j["lower"] = o.lower;
  j["grid_points_per_axis"] = a.grid;
  j["grid_width"] = o.grid_width;
  j["qp_count"] = o.qp_count;
  j["best_w"] = mcbeam::beamformer_to_json(o.best_w);
  j["wall_time_s"] = seconds_since(t0);
  emit_json(a.out, j);
  return kExitOk;
}

struct FixtureArgs {
  std::string write_instance;
};

int run_fixture(const FixtureArgs& a) {
  if (!a.write_instance.empty()) {
    mcbeam::write_instance(a.write_instance, mcbeam::to_raw(mcbeam::reference_instance()));
    std::cout << "wrote " << a.write_instance << '\n';
    return kExitOk;
  }
  const std::vector<mcbeam::ReferenceCheck> checks = mcbeam::run_reference_checks();
  int failures = 0;
  for (const auto& c : checks) {
    if (!c.pass) ++failures;
    std::printf("%s  %-16s expected %.4f  actual %.6f  (tol %g)\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.expected, c.actual, c.tol);
  }
  std::printf("%d/%zu checks passed\n", static_cast<int>(checks.size()) - failures,
              checks.size());
  return failures == 0 ? kExitOk : kExitFixture;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Globally solves single-group multicast beamforming power minimization,\n"
               "with SLA / SDR baselines and an independent phase-grid oracle."};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "branch-and-bound global solve of a JSON instance");
  solve->add_option("instance", solve_args.instance, "instance JSON file")->required();
  solve->add_option("--eps", solve_args.eps, "relative error tolerance")->capture_default_str();
  solve->add_option("--max-iter", solve_args.max_iter, "iteration limit")->capture_default_str();
  solve->add_option("--time-limit-s", solve_args.time_limit_s, "wall-clock limit in seconds");
  solve->add_option("--out", solve_args.out, "result JSON path ('-' for stdout)");

  BaselineArgs base_args;
  CLI::App* base = app.add_subcommand("baseline", "run the sla or sdr baseline on an instance");
  base->add_option("instance", base_args.instance, "instance JSON file")->required();
  base->add_option("--solver", base_args.solver, "sla or sdr")
      ->required()
      ->check(CLI::IsMember({"sla", "sdr"}));
  base->add_option("--seed", base_args.seed, "randomization seed")->capture_default_str();
  base->add_option("--samples", base_args.samples, "candidates / randomizations")
      ->capture_default_str();
  base->add_option("--out", base_args.out, "result JSON path ('-' for stdout)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "seeded benchmark over random instances (CSV)");
  bench->add_option("--n", bench_args.n, "antennas")->capture_default_str();
  bench->add_option("--m", bench_args.m, "users")->capture_default_str();
  bench->add_option("--count", bench_args.count, "number of instances")->capture_default_str();
  bench->add_option("--seed", bench_args.seed, "base seed; instance i uses seed + i")
      ->capture_default_str();
  bench->add_option("--eps", bench_args.eps, "relative error tolerance")->capture_default_str();
  bench->add_option("--samples", bench_args.samples, "baseline candidates / randomizations")
      ->capture_default_str();
  bench->add_option("--grid", bench_args.grid, "oracle grid points per axis")
      ->capture_default_str();
  bench->add_option("--max-iter", bench_args.max_iter, "per-instance iteration limit");
  bench->add_option("--time-limit-s", bench_args.time_limit_s, "per-instance time limit");
  bench->add_option("--solvers", bench_args.solvers,
                    "comma list from acr-bb,sla,sdr,oracle")
      ->capture_default_str();
  bench->add_option("--out", bench_args.out, "CSV path ('-' for stdout)");
  bench->add_option("--dump-instances", bench_args.dump_instances,
                    "directory to write the generated instances as JSON");

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle", "certified phase-grid bracketing of an instance");
  oracle->add_option("instance", oracle_args.instance, "instance JSON file")->required();
  oracle->add_option("--grid", oracle_args.grid, "grid points per axis")->capture_default_str();
  oracle->add_option("--max-qps", oracle_args.max_qps, "cap on total grid QPs")
      ->capture_default_str();
  oracle->add_option("--out", oracle_args.out, "result JSON path ('-' for stdout)");

  FixtureArgs fixture_args;
  CLI::App* fixture =
      app.add_subcommand("fixture", "check the built-in regression trace (exit 3 on mismatch)");
  fixture->add_option("--write-instance", fixture_args.write_instance,
                      "write the built-in instance as JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (base->parsed()) return run_baseline(base_args);
    if (bench->parsed()) return run_bench(bench_args);
    if (oracle->parsed()) return run_oracle(oracle_args);
    if (fixture->parsed()) return run_fixture(fixture_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
