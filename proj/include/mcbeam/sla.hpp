#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mcbeam/errors.hpp"
#include "mcbeam/problem.hpp"
#include "mcbeam/qp.hpp"
#include "mcbeam/rng.hpp"

namespace mcbeam {

/// Iterate of the successive linear approximation: the beamformer plus the
/// per-user received values v_k = (Re(h_k^H w), Im(h_k^H w)) the next
/// linearization is taken at.
struct SlaState {
  Beamformer w;
  Eigen::MatrixX2d v;  // m rows, one per user
  double objective = 0.0;
  int iteration = 0;
};

inline SlaState make_sla_state(const Problem& p, const Beamformer& w, int iteration = 0) {
  SlaState s;
  s.w = w;
  const Eigen::VectorXcd r = p.received(w);
  s.v.resize(p.m, 2);
  s.v.col(0) = r.real();
  s.v.col(1) = r.imag();
  s.objective = w.squaredNorm();
  s.iteration = iteration;
  return s;
}

/// Feasible starting point: draws `candidates` CN(0, I) vectors, scales each
/// onto the feasibility boundary by 1 / min_k |h_k^H w| (discarding draws
/// whose smallest modulus is below 1e-8), and keeps the smallest-norm result.
/// Candidates come sequentially off one seeded stream, so a larger candidate
/// budget extends rather than reshuffles a smaller one. In the razor-thin
/// case that every candidate is discarded the draw is retried on a
/// deterministic sub-seed before giving up.
inline Beamformer sla_init(const Problem& p, int candidates, std::uint64_t seed) {
  if (candidates < 1) throw std::invalid_argument("need at least one candidate");
  for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
    GaussianStream g(attempt == 0 ? seed : mix_seed(seed, attempt));
    Beamformer best;
    double best_val = std::numeric_limits<double>::infinity();
    for (int j = 0; j < candidates; ++j) {
      Beamformer w(p.n);
      for (int i = 0; i < p.n; ++i) w[i] = g.complex_normal();
      const double mmin = p.received(w).cwiseAbs().minCoeff();
      if (mmin <= 1e-8) continue;
      const double val = w.squaredNorm() / (mmin * mmin);
      if (val < best_val) {
        best_val = val;
        best = w / mmin;
      }
    }
    if (best.size() > 0) return best;
  }
  throw AllDegenerate("every initial candidate was numerically degenerate");
}

/// One linearized subproblem: minimize ||w||^2 subject to
///   ||v_k^n||^2 + 2 (v_k^n)^T (v_k - v_k^n) >= 1     for every user,
/// with v_k the received value of w. The v variables are substituted out
/// through that linear coupling, leaving a strictly convex QP in w alone
/// with the same optimizer. The previous iterate stays feasible for its own
/// linearization, so the objective never increases.
inline SlaState sla_step(const Problem& p, const SlaState& state, const QpSettings& st = {}) {
  if (state.v.rows() != p.m) throw std::invalid_argument("state does not match problem");
  const int nv = 2 * p.n;
  Qp qp;
  qp.Q = 2.0 * Eigen::MatrixXd::Identity(nv, nv);
  qp.q = Eigen::VectorXd::Zero(nv);
  qp.A.resize(0, nv);
  qp.b.resize(0);
  qp.G.resize(p.m, nv);
  qp.h.resize(p.m);
  for (int k = 0; k < p.m; ++k) {
    const double vx = state.v(k, 0), vy = state.v(k, 1);
    qp.G.row(k) = -2.0 * (vx * re_inner_row(p.channel(k)) + vy * im_inner_row(p.channel(k)));
    qp.h[k] = -(1.0 + vx * vx + vy * vy);
  }
  const QpSolution sol = solve_qp(qp, st);
  if (sol.status != QpStatus::Optimal)
    throw std::runtime_error("linearized subproblem did not converge");
  return make_sla_state(p, unstack_real(sol.x), state.iteration + 1);
}

struct SlaOptions {
  double rel_tol = 1e-6;
  int max_iter = 100;
  QpSettings qp;
};

/// Runs the successive linear approximation from a feasible w0 until the
/// relative objective decrease drops below rel_tol or max_iter steps have
/// been taken; returns the best iterate. Pass `trace` to capture every
/// accepted state including the start.
inline Beamformer sla_solve(const Problem& p, const Beamformer& w0, const SlaOptions& opt = {},
                            std::vector<SlaState>* trace = nullptr) {
  if (!is_feasible(p, w0, 1e-9)) throw std::invalid_argument("sla_solve needs a feasible start");
  SlaState state = make_sla_state(p, w0);
  if (trace) trace->push_back(state);
  SlaState best = state;
  for (int i = 0; i < opt.max_iter; ++i) {
    SlaState next = sla_step(p, state, opt.qp);
    if (trace) trace->push_back(next);
    if (next.objective < best.objective) best = next;
    const double decrease = (state.objective - next.objective) / std::max(state.objective, 1e-300);
    state = std::move(next);
    if (decrease < opt.rel_tol) break;
  }
  return best.w;
}

}  // namespace mcbeam
