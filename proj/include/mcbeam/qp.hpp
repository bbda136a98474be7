#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcbeam {

enum class QpStatus { Optimal, Infeasible, IterationLimit };

struct QpSettings {
  double tol = 1e-9;
  int max_iter = 100;
};

/// Dense strictly convex quadratic program
///   min 1/2 x^T Q x + q^T x   s.t.   A x = b,   G x <= h
/// with Q symmetric positive definite. Either constraint block may be empty
/// (0 x n matrices with 0-length right-hand sides).
struct Qp {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;

  int vars() const { return static_cast<int>(Q.rows()); }
  int eqs() const { return static_cast<int>(A.rows()); }
  int ineqs() const { return static_cast<int>(G.rows()); }

  void validate() const {
    const auto n = Q.rows();
    if (n == 0 || Q.cols() != n) throw std::invalid_argument("Q must be square and nonempty");
    if (q.size() != n) throw std::invalid_argument("q length must match Q");
    if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != n))
      throw std::invalid_argument("equality block shape mismatch");
    if (G.rows() != h.size() || (G.rows() > 0 && G.cols() != n))
      throw std::invalid_argument("inequality block shape mismatch");
    if (!Q.allFinite() || !q.allFinite() || !A.allFinite() || !b.allFinite() ||
        !G.allFinite() || !h.allFinite())
      throw std::invalid_argument("QP data must be finite");
    const Eigen::MatrixXd Qs = 0.5 * (Q + Q.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(Qs);
    if (llt.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Qs, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < 1e-12)
        throw std::invalid_argument("Q must be positive definite");
    }
  }
};

struct QpSolution {
  QpStatus status = QpStatus::IterationLimit;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda_eq;
  Eigen::VectorXd mu_ineq;
  double value = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  /// max over the stationarity / equality / inequality / complementarity
  /// residual groups at the returned point
  double kkt_residual = std::numeric_limits<double>::infinity();
  /// phase-1 constraint violation when status == Infeasible
  double infeasibility = 0.0;
};

namespace detail {

// Factorization of the reduced Newton system
//   [K  A^T] [dx]   [r1]
//   [A   0 ] [dy] = [r2],   K = Qs + G^T diag(w) G (+ ridge),
// by Cholesky of K and of the Schur complement A K^-1 A^T. Falls back to a
// full-pivot LU of the assembled saddle matrix when either factor fails.
struct KktFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd kinv_at;
  Eigen::LLT<Eigen::MatrixXd> schur;
  Eigen::FullPivLU<Eigen::MatrixXd> lu;
  bool use_lu = false;
  int n = 0;
  int p = 0;

  bool factor(const Eigen::MatrixXd& K, const Eigen::MatrixXd& A) {
    n = static_cast<int>(K.rows());
    p = static_cast<int>(A.rows());
    use_lu = false;
    llt.compute(K);
    if (llt.info() == Eigen::Success) {
      if (p == 0) return true;
      kinv_at = llt.solve(A.transpose());
      Eigen::MatrixXd S = A * kinv_at;
      S = 0.5 * (S + S.transpose()).eval();
      schur.compute(S);
      if (schur.info() == Eigen::Success) return true;
    }
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n + p, n + p);
    full.topLeftCorner(n, n) = K;
    if (p > 0) {
      full.topRightCorner(n, p) = A.transpose();
      full.bottomLeftCorner(p, n) = A;
    }
    lu.compute(full);
    use_lu = true;
    return lu.isInvertible();
  }

  void solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
             Eigen::VectorXd& dx, Eigen::VectorXd& dy) const {
    if (use_lu) {
      Eigen::VectorXd rhs(n + p);
      rhs.head(n) = r1;
      rhs.tail(p) = r2;
      const Eigen::VectorXd sol = lu.solve(rhs);
      dx = sol.head(n);
      dy = sol.tail(p);
      return;
    }
    const Eigen::VectorXd t = llt.solve(r1);
    if (p == 0) {
      dx = t;
      dy.resize(0);
      return;
    }
    dy = schur.solve(A * t - r2);
    dx = t - kinv_at * dy;
  }
};

inline double step_to_boundary(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

/// Mehrotra predictor-corrector primal-dual interior point method.
/// Infeasible start; one reduced-KKT factorization per iteration, reused for
/// the corrector solve. Residuals are measured in absolute terms against the
/// spec of QpSolution. Does not detect infeasibility; diverging problems run
/// out of iterations and are classified by the phase-1 pass in solve_qp.
inline QpSolution ipm(const Qp& qp, double tol, int max_iter) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int n = qp.vars(), p = qp.eqs(), m = qp.ineqs();
  const MatrixXd Qs = 0.5 * (qp.Q + qp.Q.transpose());

  QpSolution sol;
  sol.x = VectorXd::Zero(n);
  sol.lambda_eq = VectorXd::Zero(p);
  sol.mu_ineq = VectorXd::Zero(m);

  auto objective = [&](const VectorXd& x) { return 0.5 * x.dot(Qs * x) + qp.q.dot(x); };

  // Equality-constrained start (ignoring inequalities).
  VectorXd x(n), y = VectorXd::Zero(p);
  {
    KktFactor init;
    MatrixXd K = Qs;
    double ridge = 0.0;
    while (!init.factor(K, qp.A)) {
      ridge = (ridge == 0.0) ? 1e-12 * (1.0 + K.diagonal().cwiseAbs().maxCoeff()) : ridge * 1e3;
      K = Qs + ridge * MatrixXd::Identity(n, n);
      if (ridge > 1.0) break;
    }
    init.solve(qp.A, -qp.q, qp.b, x, y);
    if (!x.allFinite()) x.setZero();
    if (!y.allFinite()) y.setZero();
  }

  if (m == 0) {
    // Pure (in)equality-constrained QP: the start is already the KKT solve.
    const VectorXd rd = Qs * x + qp.q + qp.A.transpose() * y;
    const double viol_d = rd.size() ? rd.cwiseAbs().maxCoeff() : 0.0;
    const double viol_p = p ? (qp.A * x - qp.b).cwiseAbs().maxCoeff() : 0.0;
    sol.x = x;
    sol.lambda_eq = y;
    sol.value = objective(x);
    sol.kkt_residual = std::max(viol_d, viol_p);
    sol.status = sol.kkt_residual <= tol ? QpStatus::Optimal : QpStatus::IterationLimit;
    return sol;
  }

  VectorXd s = (qp.h - qp.G * x).cwiseMax(1.0);
  VectorXd z = VectorXd::Ones(m);

  double best_kkt = std::numeric_limits<double>::infinity();
  KktFactor kkt;

  for (int iter = 0; iter <= max_iter; ++iter) {
    const VectorXd gx = qp.G * x;
    const VectorXd rd = Qs * x + qp.q + qp.A.transpose() * y + qp.G.transpose() * z;
    const VectorXd rp = qp.A * x - qp.b;
    const VectorXd rg = gx + s - qp.h;

    const double viol_d = rd.cwiseAbs().maxCoeff();
    const double viol_p = p ? rp.cwiseAbs().maxCoeff() : 0.0;
    const double gviol = std::max((gx - qp.h).maxCoeff(), 0.0);
    const double comp = (z.array() * (gx - qp.h).array()).abs().maxCoeff();
    const double kkt_now = std::max({viol_d, viol_p, gviol, comp});

    if (kkt_now < best_kkt && x.allFinite() && z.allFinite()) {
      best_kkt = kkt_now;
      sol.x = x;
      sol.lambda_eq = y;
      sol.mu_ineq = z;
      sol.kkt_residual = kkt_now;
      sol.iterations = iter;
    }
    if (kkt_now <= tol) {
      sol.status = QpStatus::Optimal;
      sol.value = objective(sol.x);
      return sol;
    }
    if (iter == max_iter || !x.allFinite() || !z.allFinite() || !s.allFinite()) break;

    const double mu = s.dot(z) / m;
    const Eigen::ArrayXd w = z.array() / s.array();
    MatrixXd K = Qs + qp.G.transpose() * w.matrix().asDiagonal() * qp.G;
    double ridge = 0.0;
    while (!kkt.factor(K, qp.A)) {
      ridge = (ridge == 0.0) ? 1e-12 * (1.0 + K.diagonal().cwiseAbs().maxCoeff()) : ridge * 1e3;
      K.diagonal().array() += ridge;
      if (ridge > 1e3) break;
    }

    VectorXd dx, dy, ds, dz;
    auto direction = [&](const VectorXd& rc) {
      const VectorXd t = (z.array() * rg.array() - rc.array()).matrix().cwiseQuotient(s);
      const VectorXd r1 = -rd - qp.G.transpose() * t;
      kkt.solve(qp.A, r1, -rp, dx, dy);
      dz = t + (w * (qp.G * dx).array()).matrix();
      ds = -rg - qp.G * dx;
    };

    // Predictor.
    direction((s.array() * z.array()).matrix());
    const double a_aff = std::min(step_to_boundary(s, ds), step_to_boundary(z, dz));
    const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / m;
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3);
    sigma = std::clamp(sigma, 1e-12, 1.0);

    // Corrector with Mehrotra's second-order term.
    direction((s.array() * z.array() + ds.array() * dz.array() - sigma * mu).matrix());

    double tau = std::max(0.99, 1.0 - 10.0 * mu);
    tau = std::min(tau, 0.99999);
    const double alpha =
        std::min({1.0, tau * step_to_boundary(s, ds), tau * step_to_boundary(z, dz)});
    if (alpha < 1e-13) break;

    x += alpha * dx;
    y += alpha * dy;
    s += alpha * ds;
    z += alpha * dz;
  }

  sol.status = QpStatus::IterationLimit;
  sol.value = objective(sol.x);
  return sol;
}

/// Phase-1 feasibility measure for {A x = b, G x <= h}: minimizes a slack t
/// with G x - t 1 <= h. Strictly feasible by construction, so the interior
/// point method converges on it even when the original problem is empty.
inline double phase1_violation(const Qp& qp, double tol, int max_iter, bool& converged) {
  const int n = qp.vars(), p = qp.eqs(), m = qp.ineqs();
  Qp ph;
  ph.Q = Eigen::MatrixXd::Identity(n + 1, n + 1) * 1e-8;
  ph.Q(n, n) = 1.0;
  ph.q = Eigen::VectorXd::Zero(n + 1);
  ph.q[n] = 1.0;  // objective 1/2 t^2 + t drives t to its constrained minimum
  ph.A.setZero(p, n + 1);
  if (p > 0) ph.A.leftCols(n) = qp.A;
  ph.b = qp.b;
  ph.G.setZero(m, n + 1);
  ph.G.leftCols(n) = qp.G;
  ph.G.col(n).setConstant(-1.0);
  ph.h = qp.h;
  const QpSolution r = ipm(ph, tol, max_iter);
  converged = r.status == QpStatus::Optimal;
  return r.x.size() ? r.x[n] : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Solves the QP. Status is Optimal only if every KKT residual group is
/// within tol at the returned point. Problems the interior point loop cannot
/// solve are separated into Infeasible (certified by an equality rank check
/// or a phase-1 violation above tolerance) and IterationLimit.
inline QpSolution solve_qp(const Qp& qp, double tol = 1e-9, int max_iter = 100) {
  qp.validate();
  QpSolution sol = detail::ipm(qp, tol, max_iter);
  if (sol.status == QpStatus::Optimal) return sol;

  if (qp.eqs() > 0) {
    const Eigen::VectorXd xls = qp.A.colPivHouseholderQr().solve(qp.b);
    const double res = (qp.A * xls - qp.b).cwiseAbs().maxCoeff();
    if (res > 1e-8 * (1.0 + qp.b.cwiseAbs().maxCoeff())) {
      sol.status = QpStatus::Infeasible;
      sol.infeasibility = res;
      return sol;
    }
  }
  if (qp.ineqs() > 0) {
    bool ph_ok = false;
    const double t = detail::phase1_violation(qp, std::max(tol, 1e-9), 200, ph_ok);
    const double thresh = 1e-6 * (1.0 + (qp.h.size() ? qp.h.cwiseAbs().maxCoeff() : 0.0));
    if (ph_ok && t > thresh) {
      sol.status = QpStatus::Infeasible;
      sol.infeasibility = t;
      return sol;
    }
  }
  return sol;  // IterationLimit with the best iterate seen
}

inline QpSolution solve_qp(const Qp& qp, const QpSettings& st) {
  return solve_qp(qp, st.tol, st.max_iter);
}

}  // namespace mcbeam
