#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "mcbeam/acr_bb.hpp"
#include "mcbeam/parallel.hpp"
#include "mcbeam/phase_grid.hpp"
#include "mcbeam/problem.hpp"
#include "mcbeam/sdr.hpp"
#include "mcbeam/sla.hpp"

namespace mcbeam {

enum class SolverKind { AcrBb, Sla, Sdr, Oracle };

inline const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::AcrBb: return "acr-bb";
    case SolverKind::Sla: return "sla";
    case SolverKind::Sdr: return "sdr";
    case SolverKind::Oracle: return "oracle";
  }
  return "unknown";
}

struct BenchConfig {
  int n = 2;
  int m = 8;
  int count = 50;
  std::uint64_t seed = 1;
  double eps = 5e-3;
  std::vector<SolverKind> solvers = {SolverKind::AcrBb, SolverKind::Sla, SolverKind::Sdr};
  int samples = 1000;        // SDR randomizations / SLA initial candidates
  int grid = 180;            // oracle points per axis
  std::int64_t max_qps = 1'000'000;
  BbLimits limits;
  QpSettings qp;
};

struct InstanceRow {
  int instance_id = 0;
  std::uint64_t seed = 0;
  std::string solver;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::int64_t iterations = 0;
  double wall_time_s = 0.0;
  std::string status = "ok";
  double relative_gap_vs_bb = std::numeric_limits<double>::quiet_NaN();
};

struct AggregateRow {
  std::string solver;
  double mean_iterations = 0.0, worst_iterations = 0.0;
  double mean_time_s = 0.0, worst_time_s = 0.0;
  double mean_relative_gap = 0.0, worst_relative_gap = 0.0;
  double probability_of_global = 0.0;  // share of instances with gap <= 1e-3
};

struct RunReport {
  BenchConfig config;
  std::vector<InstanceRow> rows;        // instance-major, solver order per instance
  std::vector<AggregateRow> aggregates;
  std::vector<BbResult> bb_results;     // per instance, for downstream audits
};

/// Runs every configured solver on `count` instances seeded seed, seed+1, ...
/// The global solver always runs (it defines the reference value the
/// relative gaps are measured against). Instances are independent and may be
/// processed on a worker pool; rows are merged by instance index, so the
/// report does not depend on the worker count.
inline RunReport run_benchmark(const BenchConfig& cfg) {
  if (cfg.count < 1) throw std::invalid_argument("count >= 1 required");
  RunReport rep;
  rep.config = cfg;

  std::vector<SolverKind> order = cfg.solvers;
  if (std::find(order.begin(), order.end(), SolverKind::AcrBb) == order.end())
    order.insert(order.begin(), SolverKind::AcrBb);

  std::vector<std::vector<InstanceRow>> rows_by_instance(cfg.count);
  std::vector<BbResult> bb_by_instance(cfg.count);

  detail::parallel_chunks(cfg.count, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const std::uint64_t seed_i = cfg.seed + static_cast<std::uint64_t>(i);
      const Problem p = generate_instance(cfg.n, cfg.m, seed_i);
      double nu_bb = std::numeric_limits<double>::quiet_NaN();
      for (const SolverKind kind : order) {
        InstanceRow row;
        row.instance_id = static_cast<int>(i);
        row.seed = seed_i;
        row.solver = to_string(kind);
        const auto start = std::chrono::steady_clock::now();
        try {
          switch (kind) {
            case SolverKind::AcrBb: {
              BbResult r = solve_global(p, cfg.eps, cfg.limits, cfg.qp);
              row.objective = r.u_star;
              row.iterations = r.iterations;
              row.status = to_string(r.status);
              nu_bb = r.u_star;
              bb_by_instance[static_cast<std::size_t>(i)] = std::move(r);
              break;
            }
            case SolverKind::Sla: {
              std::vector<SlaState> trace;
              SlaOptions opt;
              opt.qp = cfg.qp;
              const Beamformer w =
                  sla_solve(p, sla_init(p, cfg.samples, seed_i), opt, &trace);
              row.objective = objective(w);
              row.iterations = static_cast<std::int64_t>(trace.size()) - 1;
              break;
            }
            case SolverKind::Sdr: {
              const SdpSolution sdp = solve_sdr(p);
              const Beamformer w = gaussian_randomization(p, sdp, cfg.samples, seed_i);
              row.objective = objective(w);
              row.iterations = sdp.iterations;
              row.status = sdp.status == SdpStatus::Optimal ? "ok" : "iteration_limit";
              break;
            }
            case SolverKind::Oracle: {
              const OracleResult o = phase_grid_value(p, cfg.grid, cfg.max_qps, cfg.qp);
              row.objective = o.upper;
              row.iterations = o.qp_count;
              break;
            }
          }
        } catch (const std::exception& e) {
          row.status = std::string("error: ") + e.what();
        }
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (std::isfinite(nu_bb) && nu_bb > 0.0 && std::isfinite(row.objective))
          row.relative_gap_vs_bb = (row.objective - nu_bb) / nu_bb;
        rows_by_instance[static_cast<std::size_t>(i)].push_back(std::move(row));
      }
    }
  });

  for (auto& rows : rows_by_instance)
    for (auto& row : rows) rep.rows.push_back(std::move(row));
  rep.bb_results = std::move(bb_by_instance);

  for (const SolverKind kind : order) {
    const std::string name = to_string(kind);
    AggregateRow agg;
    agg.solver = name;
    int n_rows = 0, n_global = 0;
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (const InstanceRow& row : rep.rows) {
      if (row.solver != name) continue;
      ++n_rows;
      agg.mean_iterations += static_cast<double>(row.iterations);
      agg.worst_iterations = std::max(agg.worst_iterations, static_cast<double>(row.iterations));
      agg.mean_time_s += row.wall_time_s;
      agg.worst_time_s = std::max(agg.worst_time_s, row.wall_time_s);
      agg.mean_relative_gap += row.relative_gap_vs_bb;
      worst_gap = std::max(worst_gap, row.relative_gap_vs_bb);
      if (row.relative_gap_vs_bb <= 1e-3) ++n_global;
    }
    if (n_rows == 0) continue;
    agg.mean_iterations /= n_rows;
    agg.mean_time_s /= n_rows;
    agg.mean_relative_gap /= n_rows;
    agg.worst_relative_gap = worst_gap;
    agg.probability_of_global = static_cast<double>(n_global) / n_rows;
    rep.aggregates.push_back(std::move(agg));
  }
  return rep;
}

namespace detail {
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

/// Fixed-column CSV: instance rows first, then one aggregate row per solver.
/// Floating point is written with 17 significant digits.
inline void write_csv(std::ostream& out, const RunReport& rep) {
  out << "row_type,n,m,instance_id,seed,solver,objective,iterations,wall_time_s,status,"
         "relative_gap_vs_bb,mean_iterations,worst_iterations,mean_time_s,worst_time_s,"
         "mean_relative_gap,worst_relative_gap,probability_of_global\n";
  for (const InstanceRow& r : rep.rows) {
    out << "instance," << rep.config.n << ',' << rep.config.m << ',' << r.instance_id << ','
        << r.seed << ',' << r.solver << ',' << detail::csv_num(r.objective) << ','
        << r.iterations << ',' << detail::csv_num(r.wall_time_s) << ',' << r.status << ','
        << detail::csv_num(r.relative_gap_vs_bb) << ",,,,,,,\n";
  }
  for (const AggregateRow& a : rep.aggregates) {
    out << "aggregate," << rep.config.n << ',' << rep.config.m << ",,," << a.solver
        << ",,,,,," << detail::csv_num(a.mean_iterations) << ','
        << detail::csv_num(a.worst_iterations) << ',' << detail::csv_num(a.mean_time_s) << ','
        << detail::csv_num(a.worst_time_s) << ',' << detail::csv_num(a.mean_relative_gap) << ','
        << detail::csv_num(a.worst_relative_gap) << ','
        << detail::csv_num(a.probability_of_global) << '\n';
  }
}

}  // namespace mcbeam
