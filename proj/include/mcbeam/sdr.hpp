#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "mcbeam/errors.hpp"
#include "mcbeam/problem.hpp"
#include "mcbeam/rng.hpp"

namespace mcbeam {

enum class SdpStatus { Optimal, IterationLimit };

struct SdpSolution {
  SdpStatus status = SdpStatus::IterationLimit;
  Eigen::MatrixXcd W;       // Hermitian PSD
  double value = std::numeric_limits<double>::quiet_NaN();  // Trace(W)
  double duality_gap = std::numeric_limits<double>::infinity();
  Eigen::VectorXd y;        // dual multipliers, one per user
  int iterations = 0;       // total Newton steps
};

namespace detail {

// Real symmetric embedding of a Hermitian matrix: W = X + iY maps to
// T(W) = [X -Y; Y X], and W >= 0 iff T(W) >= 0. The embedded constraint
// matrices T(h h^H) factor as u u^T + v v^T with u = (Re h; Im h) and
// v = (-Im h; Re h).
inline Eigen::VectorXd embed_u(const Eigen::VectorXcd& h) {
  Eigen::VectorXd u(2 * h.size());
  u.head(h.size()) = h.real();
  u.tail(h.size()) = h.imag();
  return u;
}

inline Eigen::VectorXd embed_v(const Eigen::VectorXcd& h) {
  Eigen::VectorXd v(2 * h.size());
  v.head(h.size()) = -h.imag();
  v.tail(h.size()) = h.real();
  return v;
}

}  // namespace detail

/// Solves the semidefinite relaxation
///   min Trace(W)  s.t.  Trace(h_k h_k^H W) >= 1,  W Hermitian PSD
/// over the real symmetric embedding of dimension 2n.
///
/// The method follows the central path of the dual
///   max 1^T y  s.t.  Z = C - sum_k y_k A_k >= 0,  y >= 0
/// (damped Newton on the log-det barrier for a decreasing sequence of mu) and
/// recovers the primal at the end as X = mu Z^{-1}, which is feasible near
/// the path and makes the duality gap mu (2n + m). The recovered matrix is
/// eigenvalue-clipped to exact PSD and rescaled onto the constraint
/// boundary, so the returned pair is primal-dual feasible and the reported
/// gap is a true suboptimality bound.
inline SdpSolution solve_sdr(const Problem& p, double tol = 1e-7) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int n = p.n, m = p.m, ne = 2 * n;

  // Constraint factors: A_k = (u_k u_k^T + v_k v_k^T) / 2 = T(h_k h_k^H) / 2,
  // paired with C = I/2 so that <C, T(W)> = Trace(W) and <A_k, T(W)> =
  // Trace(h_k h_k^H W).
  MatrixXd U(ne, m), V(ne, m);
  for (int k = 0; k < m; ++k) {
    U.col(k) = detail::embed_u(p.channel(k)) / std::sqrt(2.0);
    V.col(k) = detail::embed_v(p.channel(k)) / std::sqrt(2.0);
  }
  const VectorXd lam = 0.5 * p.channels.colwise().squaredNorm().transpose();  // ||A_k||_2

  // Strictly interior dual start: sum_k y_k A_k <= I/4, so Z >= I/4.
  VectorXd y(m);
  for (int k = 0; k < m; ++k) y[k] = 0.25 / (m * lam[k]);

  auto z_of = [&](const VectorXd& yy) -> MatrixXd {
    MatrixXd Z = 0.5 * MatrixXd::Identity(ne, ne);
    Z.noalias() -= U * yy.asDiagonal() * U.transpose();
    Z.noalias() -= V * yy.asDiagonal() * V.transpose();
    return 0.5 * (Z + Z.transpose()).eval();
  };

  auto barrier = [&](const VectorXd& yy, double mu, const Eigen::LLT<MatrixXd>& llt) {
    double logdet = 0.0;
    for (int i = 0; i < ne; ++i) logdet += std::log(llt.matrixLLT()(i, i));
    logdet *= 2.0;
    return -yy.sum() - mu * logdet - mu * yy.array().log().sum();
  };

  SdpSolution out;
  const double mu_target = tol / (4.0 * (ne + m));
  double mu = 1.0;
  Eigen::LLT<MatrixXd> zllt(z_of(y));
  if (zllt.info() != Eigen::Success) throw std::runtime_error("interior start failed");
  int newton_total = 0;
  const int newton_cap = 2000;

  while (true) {
    // Center for the current mu.
    for (int it = 0; it < 60 && newton_total < newton_cap; ++it) {
      // P = Z^{-1} [U V]; gradient and Hessian of the barrier in y.
      MatrixXd P(ne, 2 * m);
      P.leftCols(m) = U;
      P.rightCols(m) = V;
      P = zllt.solve(P);
      VectorXd grad(m);
      for (int k = 0; k < m; ++k)
        grad[k] = -1.0 + mu * (U.col(k).dot(P.col(k)) + V.col(k).dot(P.col(m + k))) - mu / y[k];
      MatrixXd UtP = U.transpose() * P;          // m x 2m
      MatrixXd VtP = V.transpose() * P;          // m x 2m
      MatrixXd H(m, m);
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const double uu = UtP(j, k), uv = UtP(j, m + k);
          const double vu = VtP(j, k), vv = VtP(j, m + k);
          H(j, k) = mu * (uu * uu + uv * uv + vu * vu + vv * vv);
        }
      H.diagonal().array() += mu / y.array().square();

      const VectorXd dy = -Eigen::LLT<MatrixXd>(0.5 * (H + H.transpose())).solve(grad);
      const double decrement2 = -grad.dot(dy);
      if (grad.cwiseAbs().maxCoeff() <= 0.05 * mu / std::max(1.0, y.maxCoeff()) ||
          decrement2 <= 1e-22)
        break;

      const double f0 = barrier(y, mu, zllt);
      double step = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
        const VectorXd yt = y + step * dy;
        if ((yt.array() <= 0.0).any()) continue;
        Eigen::LLT<MatrixXd> cand(z_of(yt));
        if (cand.info() != Eigen::Success) continue;
        if (barrier(yt, mu, cand) < f0 - 1e-14 * std::abs(f0)) {
          y = yt;
          zllt = std::move(cand);
          accepted = true;
          break;
        }
      }
      ++newton_total;
      if (!accepted) break;
    }
    if (mu <= mu_target || newton_total >= newton_cap) break;
    mu = std::max(0.3 * mu, mu_target);
  }
  out.iterations = newton_total;

  // Primal recovery, structure averaging, PSD clipping.
  MatrixXd X = mu * zllt.solve(MatrixXd::Identity(ne, ne));
  X = 0.5 * (X + X.transpose()).eval();
  const MatrixXd Pb = X.topLeftCorner(n, n), Qb = X.topRightCorner(n, n);
  const MatrixXd Rb = X.bottomLeftCorner(n, n), Sb = X.bottomRightCorner(n, n);
  Eigen::MatrixXcd W =
      (0.5 * (Pb + Sb)).cast<std::complex<double>>() +
      std::complex<double>(0, 0.5) * (Rb - Qb).cast<std::complex<double>>();
  W = 0.5 * (W + W.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W);
  const Eigen::VectorXd evs = es.eigenvalues().cwiseMax(0.0);
  W = es.eigenvectors() * evs.asDiagonal() * es.eigenvectors().adjoint();
  W = 0.5 * (W + W.adjoint()).eval();

  // Push the recovered point exactly onto the constraint set.
  double margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k)
    margin = std::min(margin, std::real(p.channel(k).dot(W * p.channel(k))));
  if (margin < 1.0) {
    if (!(margin > 0.0)) throw std::runtime_error("primal recovery failed");
    W /= margin;
  }

  out.W = std::move(W);
  out.value = out.W.real().trace();
  out.y = y;
  out.duality_gap = out.value - y.sum();
  out.status = out.duality_gap <= tol ? SdpStatus::Optimal : SdpStatus::IterationLimit;
  return out;
}

/// Second-largest over largest eigenvalue; 0 for a rank-one matrix.
inline double rank_one_ratio(const Eigen::MatrixXcd& W) {
  if (W.rows() != W.cols() || W.rows() == 0) throw std::invalid_argument("W must be square");
  if (W.norm() == 0.0) throw std::invalid_argument("rank_one_ratio of the zero matrix");
  if (W.rows() == 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending
  return ev[ev.size() - 2] / ev[ev.size() - 1];
}

/// Gaussian randomization: draws `samples` vectors from CN(0, W), scales each
/// onto the feasibility boundary by 1 / min_k |h_k^H xi|, and returns the
/// smallest-norm result. A numerically rank-one W short-circuits to its
/// scaled principal eigenvector.
inline Beamformer gaussian_randomization(const Problem& p, const SdpSolution& sdp, int samples,
                                         std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sdp.W);
  const Eigen::VectorXd evs = es.eigenvalues().cwiseMax(0.0);
  const int n = p.n;

  if (rank_one_ratio(sdp.W) <= 1e-7) {
    Beamformer w = std::sqrt(evs[n - 1]) * es.eigenvectors().col(n - 1);
    const double mmin = p.received(w).cwiseAbs().minCoeff();
    if (mmin > 1e-8) return w / mmin;
    // fall through to sampling in this degenerate corner
  }

  const Eigen::MatrixXcd factor =
      es.eigenvectors() * evs.cwiseSqrt().asDiagonal();  // factor factor^H = W
  for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
    GaussianStream g(attempt == 0 ? seed : mix_seed(seed, attempt));
    Beamformer best;
    double best_val = std::numeric_limits<double>::infinity();
    for (int j = 0; j < samples; ++j) {
      Eigen::VectorXcd gs(n);
      for (int i = 0; i < n; ++i) gs[i] = g.complex_normal();
      const Beamformer xi = factor * gs;
      const double mmin = p.received(xi).cwiseAbs().minCoeff();
      if (mmin <= 1e-8) continue;
      const double val = xi.squaredNorm() / (mmin * mmin);
      if (val < best_val) {
        best_val = val;
        best = xi / mmin;
      }
    }
    if (best.size() > 0) return best;
  }
  throw AllDegenerate("every randomization sample was numerically degenerate");
}

}  // namespace mcbeam
