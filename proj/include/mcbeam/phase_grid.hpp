#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "mcbeam/argument_cuts.hpp"
#include "mcbeam/parallel.hpp"
#include "mcbeam/problem.hpp"
#include "mcbeam/qp.hpp"

namespace mcbeam {

/// Two-sided certificate around the optimal value from an independent route:
/// lower <= nu* <= upper.
struct OracleResult {
  double upper = std::numeric_limits<double>::infinity();  // best grid QP value
  double lower = 0.0;                                      // upper * cos^2(grid_width / 2)
  Beamformer best_w;
  double grid_width = 0.0;  // spacing per axis, radians
  std::int64_t qp_count = 0;
};

/// Certified bracketing of the optimum by gridding the m-1 free phases.
///
/// For each phi on the grid {0, Delta, ..., 2 pi - Delta}^(m-1) it solves
///   min ||w||^2  s.t.  Re(e^{-i phi_k} h_k^H w) >= 1 (k < m-1),
///                      Re(h_{m-1}^H w) >= 1,
/// a halfspace-constrained QP whose feasible set sits inside the original
/// problem's, so the best value is an upper bound. The grid phase nearest the
/// true optimizer's phases misses each by at most Delta/2, and dividing that
/// QP's feasible point by cos(Delta/2) certifies lower = upper cos^2(Delta/2).
/// Grid points whose halfspaces are mutually exclusive are skipped.
inline OracleResult phase_grid_value(const Problem& p, int grid_points_per_axis,
                                     std::int64_t max_qps = 1'000'000,
                                     const QpSettings& st = {}) {
  if (grid_points_per_axis < 1) throw std::invalid_argument("need at least one grid point");
  const int axes = p.m - 1;
  const double total_d = std::pow(static_cast<double>(grid_points_per_axis), axes);
  if (!(total_d <= static_cast<double>(max_qps)))
    throw std::invalid_argument("phase grid cap exceeded: " + std::to_string(total_d) +
                                " QPs requested, cap " + std::to_string(max_qps));
  const std::int64_t total = static_cast<std::int64_t>(total_d);
  const double delta = kTwoPi / grid_points_per_axis;
  const int nv = 2 * p.n;

  // Rotation by phi only mixes the two precomputed rows of each channel:
  // Re(e^{-i phi} h^H w) = cos(phi) Re(h^H w) + sin(phi) Im(h^H w).
  std::vector<Eigen::RowVectorXd> re_rows(p.m), im_rows(p.m);
  for (int k = 0; k < p.m; ++k) {
    re_rows[k] = re_inner_row(p.channel(k));
    im_rows[k] = im_inner_row(p.channel(k));
  }
  std::vector<double> cos_tab(grid_points_per_axis), sin_tab(grid_points_per_axis);
  for (int j = 0; j < grid_points_per_axis; ++j) {
    cos_tab[j] = std::cos(delta * j);
    sin_tab[j] = std::sin(delta * j);
  }

  std::mutex best_mutex;
  double best_val = std::numeric_limits<double>::infinity();
  std::int64_t best_idx = -1;
  Beamformer best_w;

  detail::parallel_chunks(total, [&](std::int64_t begin, std::int64_t end) {
    Qp qp;
    qp.Q = 2.0 * Eigen::MatrixXd::Identity(nv, nv);
    qp.q = Eigen::VectorXd::Zero(nv);
    qp.A.resize(0, nv);
    qp.b.resize(0);
    qp.G.resize(p.m, nv);
    qp.h = Eigen::VectorXd::Constant(p.m, -1.0);
    qp.G.row(axes) = -re_rows[static_cast<std::size_t>(axes)];

    double local_val = std::numeric_limits<double>::infinity();
    std::int64_t local_idx = -1;
    Beamformer local_w;
    for (std::int64_t idx = begin; idx < end; ++idx) {
      std::int64_t rem = idx;
      for (int k = 0; k < axes; ++k) {
        const int j = static_cast<int>(rem % grid_points_per_axis);
        rem /= grid_points_per_axis;
        qp.G.row(k) = -(cos_tab[j] * re_rows[static_cast<std::size_t>(k)] +
                        sin_tab[j] * im_rows[static_cast<std::size_t>(k)]);
      }
      const QpSolution sol = solve_qp(qp, st);
      if (sol.status == QpStatus::Infeasible) continue;
      if (sol.status != QpStatus::Optimal)
        throw std::runtime_error("oracle grid QP did not converge");
      if (sol.value < local_val) {
        local_val = sol.value;
        local_idx = idx;
        local_w = unstack_real(sol.x);
      }
    }
    if (local_idx >= 0) {
      std::lock_guard<std::mutex> lock(best_mutex);
      if (local_val < best_val || (local_val == best_val && local_idx < best_idx)) {
        best_val = local_val;
        best_idx = local_idx;
        best_w = std::move(local_w);
      }
    }
  });

  if (best_idx < 0) throw std::runtime_error("every grid QP was infeasible");
  OracleResult out;
  out.upper = best_val;
  const double c = std::cos(0.5 * delta);
  out.lower = best_val * c * c;
  out.best_w = std::move(best_w);
  out.grid_width = delta;
  out.qp_count = total;
  return out;
}

}  // namespace mcbeam
