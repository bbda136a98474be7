#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "mcbeam/rng.hpp"

namespace mcbeam {

using Beamformer = Eigen::VectorXcd;

/// Raw QoS-constrained power minimization instance:
///   min ||w||^2  s.t.  |h_k^H w|^2 / sigma2_k >= gamma_k  for every user k.
struct RawInstance {
  int n = 0;                   // transmit antennas
  int m = 0;                   // users
  Eigen::MatrixXcd channels;   // n x m, column k is user k's channel h_k
  Eigen::VectorXd gamma;       // SNR targets, one per user, > 0
  Eigen::VectorXd sigma2;      // noise variances, one per user, > 0
  std::optional<std::uint64_t> seed;  // provenance only

  void validate() const {
    if (n < 1 || m < 1) throw std::invalid_argument("instance needs n >= 1 and m >= 1");
    if (channels.rows() != n || channels.cols() != m)
      throw std::invalid_argument("channel matrix must be n x m");
    if (gamma.size() != m || sigma2.size() != m)
      throw std::invalid_argument("gamma and sigma2 must have one entry per user");
    for (int k = 0; k < m; ++k) {
      if (channels.col(k).norm() == 0.0)
        throw std::invalid_argument("zero channel vector makes a user infeasible");
      if (!(gamma[k] > 0.0)) throw std::invalid_argument("gamma must be positive");
      if (!(sigma2[k] > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    }
    if (!channels.allFinite()) throw std::invalid_argument("channels must be finite");
  }
};

/// Normalized problem:  min ||w||^2  s.t.  |h_k^H w|^2 >= 1 for all k,
/// where column k holds h_k / sqrt(gamma_k sigma2_k). The last user (index
/// m-1) is the phase-anchored user in the branch-and-bound solver.
struct Problem {
  int n = 0;
  int m = 0;
  Eigen::MatrixXcd channels;  // n x m, already normalized
  std::optional<std::uint64_t> seed;

  const Eigen::MatrixXcd::ConstColXpr channel(int k) const { return channels.col(k); }

  /// Inner products h_k^H w for all users at once.
  Eigen::VectorXcd received(const Beamformer& w) const {
    if (w.size() != n) throw std::invalid_argument("beamformer length mismatch");
    return channels.adjoint() * w;
  }
};

inline Problem normalize(const RawInstance& raw) {
  raw.validate();
  Problem p;
  p.n = raw.n;
  p.m = raw.m;
  p.seed = raw.seed;
  p.channels.resize(raw.n, raw.m);
  for (int k = 0; k < raw.m; ++k)
    p.channels.col(k) = raw.channels.col(k) / std::sqrt(raw.gamma[k] * raw.sigma2[k]);
  return p;
}

/// Round-trip companion of normalize for generated (gamma = sigma2 = 1)
/// problems, used by the JSON writer.
inline RawInstance to_raw(const Problem& p) {
  RawInstance raw;
  raw.n = p.n;
  raw.m = p.m;
  raw.channels = p.channels;
  raw.gamma = Eigen::VectorXd::Ones(p.m);
  raw.sigma2 = Eigen::VectorXd::Ones(p.m);
  raw.seed = p.seed;
  return raw;
}

/// Random instance with i.i.d. CN(0, 1) channel entries (each complex entry
/// has total variance 1) and gamma = sigma2 = 1. Deterministic per seed;
/// entries are drawn user by user, antenna by antenna.
inline Problem generate_instance(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("generate_instance needs n, m >= 1");
  GaussianStream g(seed);
  Problem p;
  p.n = n;
  p.m = m;
  p.seed = seed;
  p.channels.resize(n, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n; ++i) p.channels(i, k) = g.complex_normal();
  return p;
}

inline double objective(const Beamformer& w) { return w.squaredNorm(); }

/// min_k |h_k^H w| - 1; nonnegative exactly when w is feasible.
inline double feasibility_margin(const Problem& p, const Beamformer& w) {
  return p.received(w).cwiseAbs().minCoeff() - 1.0;
}

inline bool is_feasible(const Problem& p, const Beamformer& w, double tol = 1e-9) {
  return feasibility_margin(p, w) >= -tol;
}

/// Rescales a power-minimization solution onto the power budget; the result
/// maximizes the minimum received SNR among all scalings of w_star.
inline Beamformer to_maxmin(const Beamformer& w_star, double power_budget) {
  if (!(power_budget > 0.0)) throw std::invalid_argument("power budget must be positive");
  const double nrm = w_star.norm();
  if (nrm == 0.0) throw std::invalid_argument("cannot rescale the zero beamformer");
  return std::sqrt(power_budget) / nrm * w_star;
}

// Fixed complex-to-real mapping, used by every solver in the project:
// w in C^n maps to x = (Re w; Im w) in R^(2n), and for a channel h
//   Re(h^H w) = Re(h)^T Re(w) + Im(h)^T Im(w)
//   Im(h^H w) = Re(h)^T Im(w) - Im(h)^T Re(w).

inline Eigen::VectorXd stack_real(const Beamformer& w) {
  Eigen::VectorXd x(2 * w.size());
  x.head(w.size()) = w.real();
  x.tail(w.size()) = w.imag();
  return x;
}

inline Beamformer unstack_real(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) throw std::invalid_argument("stacked vector must have even length");
  const auto n = x.size() / 2;
  Beamformer w(n);
  w.real() = x.head(n);
  w.imag() = x.tail(n);
  return w;
}

/// Row r with r . x = Re(h^H w).
inline Eigen::RowVectorXd re_inner_row(const Eigen::VectorXcd& h) {
  Eigen::RowVectorXd r(2 * h.size());
  r.head(h.size()) = h.real();
  r.tail(h.size()) = h.imag();
  return r;
}

/// Row r with r . x = Im(h^H w).
inline Eigen::RowVectorXd im_inner_row(const Eigen::VectorXcd& h) {
  Eigen::RowVectorXd r(2 * h.size());
  r.head(h.size()) = -h.imag();
  r.tail(h.size()) = h.real();
  return r;
}

}  // namespace mcbeam
