#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcbeam/argument_cuts.hpp"
#include "mcbeam/errors.hpp"
#include "mcbeam/problem.hpp"
#include "mcbeam/qp.hpp"

namespace mcbeam {

/// Argument box: one interval per user 0..m-2. The last user is anchored
/// (its constraint is posed as Re(h^H w) >= 1, Im(h^H w) = 0) and has no
/// interval.
using ArgBox = std::vector<ArgInterval>;

inline ArgBox root_box(int m) {
  if (m < 1) throw std::invalid_argument("m >= 1 required");
  return ArgBox(static_cast<std::size_t>(m - 1), ArgInterval(0.0, kTwoPi));
}

/// The argument-cut relaxation over a box, as a real QP in x = (Re w; Im w):
///   min ||x||^2
///   s.t. Im(h_{m-1}^H w)  = 0
///        Re(h_{m-1}^H w) >= 1
///        envelope cuts of interval k applied to h_k^H w, for every k whose
///        interval is at most pi wide (wider intervals contribute nothing).
inline Qp build_acr(const Problem& p, const ArgBox& box) {
  if (static_cast<int>(box.size()) != p.m - 1)
    throw std::invalid_argument("argument box needs m - 1 intervals");
  const int nv = 2 * p.n;
  const Eigen::VectorXcd anchor = p.channel(p.m - 1);

  Qp qp;
  qp.Q = 2.0 * Eigen::MatrixXd::Identity(nv, nv);
  qp.q = Eigen::VectorXd::Zero(nv);
  qp.A.resize(1, nv);
  qp.A.row(0) = im_inner_row(anchor);
  qp.b = Eigen::VectorXd::Zero(1);

  std::vector<std::pair<Eigen::RowVectorXd, double>> rows;  // row . x <= rhs
  rows.emplace_back(-re_inner_row(anchor), -1.0);
  for (int k = 0; k + 1 < p.m; ++k) {
    const CutSet cs = envelope_cuts(box[static_cast<std::size_t>(k)]);
    if (cs.empty()) continue;
    const Eigen::RowVectorXd re = re_inner_row(p.channel(k));
    const Eigen::RowVectorXd im = im_inner_row(p.channel(k));
    for (const Cut& c : cs) rows.emplace_back(-(c.a * re + c.b * im), -c.rho);
  }
  qp.G.resize(static_cast<Eigen::Index>(rows.size()), nv);
  qp.h.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    qp.G.row(static_cast<Eigen::Index>(i)) = rows[i].first;
    qp.h[static_cast<Eigen::Index>(i)] = rows[i].second;
  }
  return qp;
}

enum class AcrStatus { Optimal, Infeasible };

struct AcrSolution {
  AcrStatus status = AcrStatus::Infeasible;
  Beamformer w;
  Eigen::VectorXcd c;  // h_k^H w for k = 0..m-2, derived from w
  double value = std::numeric_limits<double>::quiet_NaN();  // ||w||^2
};

/// Solves the relaxation over a box. Child boxes of the branch-and-bound can
/// carve away the whole relaxed feasible set, which surfaces here as an
/// Infeasible result rather than an error.
inline AcrSolution solve_acr(const Problem& p, const ArgBox& box, const QpSettings& st = {}) {
  const Qp qp = build_acr(p, box);
  const QpSolution qs = solve_qp(qp, st);
  AcrSolution out;
  if (qs.status == QpStatus::Infeasible) return out;
  if (qs.status != QpStatus::Optimal)
    throw std::runtime_error("relaxation subproblem did not converge (kkt residual " +
                             std::to_string(qs.kkt_residual) + ")");
  out.status = AcrStatus::Optimal;
  out.w = unstack_real(qs.x);
  out.c = p.received(out.w).head(p.m - 1);
  out.value = out.w.squaredNorm();
  return out;
}

/// w / min(|c_1|, ..., |c_{m-1}|, 1). Feasible for the original problem
/// whenever (w, c) is relaxation-feasible with c_k = h_k^H w.
inline Beamformer scale_to_feasible(const Beamformer& w, const Eigen::VectorXcd& c,
                                    double floor = 1e-8) {
  double mmin = 1.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) mmin = std::min(mmin, std::abs(c[k]));
  if (mmin <= floor)
    throw DegenerateScale("scale denominator " + std::to_string(mmin) + " below floor");
  return w / mmin;
}

/// Branch variable rule: the user whose |c_k| is smallest (ties to the lowest
/// index). Returns a 0-based index into c.
inline int select_branch_index(const Eigen::VectorXcd& c) {
  if (c.size() == 0) throw std::invalid_argument("no branch candidates");
  int k_star = 0;
  double best = std::abs(c[0]);
  for (Eigen::Index k = 1; k < c.size(); ++k) {
    const double a = std::abs(c[k]);
    if (a < best) {
      best = a;
      k_star = static_cast<int>(k);
    }
  }
  return k_star;
}

/// Midpoint bisection of interval k_star; every other interval is copied.
inline std::pair<ArgBox, ArgBox> branch(const ArgBox& box, int k_star) {
  if (k_star < 0 || k_star >= static_cast<int>(box.size()))
    throw std::invalid_argument("branch index out of range");
  const ArgInterval& iv = box[static_cast<std::size_t>(k_star)];
  if (!(iv.width() > 0.0))
    throw std::logic_error("branching a zero-width interval (should terminate first)");
  const double z = iv.midpoint();
  ArgBox left = box, right = box;
  left[static_cast<std::size_t>(k_star)] = ArgInterval(iv.lo, z);
  right[static_cast<std::size_t>(k_star)] = ArgInterval(z, iv.hi);
  return {std::move(left), std::move(right)};
}

inline double relative_gap(double upper, double lower) {
  if (!(lower > 0.0)) throw std::invalid_argument("relative gap needs a positive lower bound");
  return (upper - lower) / lower;
}

/// Worst-case iteration count T = ceil((2 pi / delta)^(m-1)) + 1 with
/// delta = arccos(1 / sqrt(1 + eps)). Saturates to INT64_MAX when the value
/// is astronomical.
inline std::int64_t iteration_bound(int m, double eps) {
  if (m < 1) throw std::invalid_argument("m >= 1 required");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double delta = std::acos(1.0 / std::sqrt(1.0 + eps));
  const double t = std::pow(kTwoPi / delta, m - 1);
  if (!(t < 9.0e18)) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::ceil(t)) + 1;
}

inline bool iteration_bound_is_astronomical(std::int64_t t) {
  return t == std::numeric_limits<std::int64_t>::max();
}

struct BbLimits {
  std::int64_t max_iter = 1'000'000;
  double time_limit_s = std::numeric_limits<double>::infinity();
};

enum class BbStatus { Converged, IterationLimit, TimeLimit };

inline const char* to_string(BbStatus s) {
  switch (s) {
    case BbStatus::Converged: return "converged";
    case BbStatus::IterationLimit: return "iteration_limit";
    case BbStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

/// One row per iteration. `lower` is the chosen node's bound L^t, `upper` the
/// upper bound U^t at the end of the iteration, `gap` the value tested for
/// termination at the top (which uses the incoming upper bound). The terminal
/// row has branch_user = 0 and NaN child values.
struct IterationRecord {
  std::int64_t t = 0;
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;
  int branch_user = 0;  // 1-based user id of the branched interval
  double split_point = std::numeric_limits<double>::quiet_NaN();
  double left_value = std::numeric_limits<double>::quiet_NaN();
  double right_value = std::numeric_limits<double>::quiet_NaN();
};

struct BbResult {
  BbStatus status = BbStatus::IterationLimit;
  Beamformer w_star;
  double u_star = std::numeric_limits<double>::infinity();
  double l_final = 0.0;
  std::int64_t iterations = 0;
  std::vector<IterationRecord> trace;
};

namespace detail {

struct BbNode {
  ArgBox box;
  Eigen::VectorXcd c;
  double value = 0.0;  // optimal value of the relaxation over box
  std::int64_t seq = 0;
};

struct BbNodeOrder {
  // min-heap by (value, seq): best-first with FIFO tie-breaking
  bool operator()(const BbNode& a, const BbNode& b) const {
    if (a.value != b.value) return a.value > b.value;
    return a.seq > b.seq;
  }
};

}  // namespace detail

/// Best-first branch-and-bound over argument boxes.
///
/// Each iteration pops the least-bound node, tests the relative gap against
/// the incoming upper bound, and otherwise bisects the argmin-|c_k| interval
/// at its midpoint. Children are solved left then right; a child is queued
/// when its bound does not exceed the current upper bound, and the upper
/// bound is refreshed from the child's scaled feasible point between the two
/// insertions (so the right child sees the left child's update, matching the
/// sequential statement order of the method).
inline BbResult solve_global(const Problem& p, double eps, const BbLimits& limits = {},
                             const QpSettings& qs = {}) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  if (eps == 0.0 && limits.max_iter >= std::numeric_limits<std::int64_t>::max() &&
      !(limits.time_limit_s < std::numeric_limits<double>::infinity()))
    throw std::invalid_argument("eps = 0 requires a finite iteration or time limit");
  const auto t_start = std::chrono::steady_clock::now();
  const auto elapsed_s = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };
  constexpr double kScaleFloor = 1e-8;

  std::priority_queue<detail::BbNode, std::vector<detail::BbNode>, detail::BbNodeOrder> open;
  std::int64_t next_seq = 0;

  BbResult res;
  res.u_star = std::numeric_limits<double>::infinity();

  // Root relaxation and initial incumbent.
  const AcrSolution root = solve_acr(p, root_box(p.m), qs);
  if (root.status != AcrStatus::Optimal)
    throw std::runtime_error("root relaxation infeasible; instance is invalid");
  double scale_min = 1.0;
  for (Eigen::Index k = 0; k < root.c.size(); ++k)
    scale_min = std::min(scale_min, std::abs(root.c[k]));
  if (scale_min > kScaleFloor) {
    res.w_star = root.w / scale_min;
    res.u_star = res.w_star.squaredNorm();
  }
  open.push({root_box(p.m), root.c, root.value, next_seq++});
  res.trace.push_back({0, root.value, res.u_star,
                       std::isfinite(res.u_star) ? relative_gap(res.u_star, root.value)
                                                 : std::numeric_limits<double>::infinity(),
                       0, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN()});

  for (std::int64_t t = 1;; ++t) {
    if (t > limits.max_iter || elapsed_s() > limits.time_limit_s) {
      res.status = t > limits.max_iter ? BbStatus::IterationLimit : BbStatus::TimeLimit;
      res.l_final = open.empty() ? res.u_star : open.top().value;
      res.iterations = t - 1;
      return res;
    }
    if (open.empty()) {
      // Every remaining node was pruned against the incumbent.
      res.status = BbStatus::Converged;
      res.l_final = res.u_star;
      res.iterations = t;
      res.trace.push_back({t, res.u_star, res.u_star, 0.0, 0,
                           std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN()});
      return res;
    }

    detail::BbNode node = open.top();
    open.pop();
    const double gap = std::isfinite(res.u_star) ? relative_gap(res.u_star, node.value)
                                                 : std::numeric_limits<double>::infinity();
    if (gap < eps) {
      res.status = BbStatus::Converged;
      res.l_final = node.value;
      res.iterations = t;
      res.trace.push_back({t, node.value, res.u_star, gap, 0,
                           std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN()});
      return res;
    }

    const int k_star = select_branch_index(node.c);
    const double split = node.box[static_cast<std::size_t>(k_star)].midpoint();
    auto [left_box, right_box] = branch(node.box, k_star);

    IterationRecord rec;
    rec.t = t;
    rec.lower = node.value;
    rec.gap = gap;
    rec.branch_user = k_star + 1;
    rec.split_point = split;

    auto process_child = [&](ArgBox&& child_box, double& recorded_value) {
      const AcrSolution child = solve_acr(p, child_box, qs);
      if (child.status != AcrStatus::Optimal) return;  // pruned: box carved empty
      recorded_value = child.value;
      if (!(child.value > 0.0)) throw std::runtime_error("nonpositive relaxation value");
      if (child.value <= res.u_star)
        open.push({std::move(child_box), child.c, child.value, next_seq++});
      double mmin = 1.0;
      for (Eigen::Index k = 0; k < child.c.size(); ++k)
        mmin = std::min(mmin, std::abs(child.c[k]));
      if (mmin <= kScaleFloor) return;  // skip the upper-bound update
      const Beamformer scaled = child.w / mmin;
      const double val = scaled.squaredNorm();
      if (res.u_star > val) {
        res.u_star = val;
        res.w_star = scaled;
      }
    };
    process_child(std::move(left_box), rec.left_value);
    process_child(std::move(right_box), rec.right_value);

    rec.upper = res.u_star;
    res.trace.push_back(rec);
  }
}

}  // namespace mcbeam
