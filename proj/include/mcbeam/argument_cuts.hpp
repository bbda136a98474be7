#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcbeam {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Closed argument interval [lo, hi] within [0, 2*pi]. Intervals never wrap:
/// midpoint bisection of [0, 2*pi] only ever produces nested subintervals.
struct ArgInterval {
  double lo = 0.0;
  double hi = kTwoPi;

  ArgInterval() = default;
  ArgInterval(double l, double u) : lo(l), hi(u) {
    if (!(l <= u)) throw std::invalid_argument("argument interval needs lo <= hi");
    if (l < -1e-12 || u > kTwoPi + 1e-12)
      throw std::invalid_argument("argument interval must lie in [0, 2*pi]");
  }

  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Halfplane a*x + b*y >= rho in the (Re c, Im c) plane.
struct Cut {
  double a = 0.0;
  double b = 0.0;
  double rho = 0.0;

  bool satisfied(double x, double y, double tol) const { return a * x + b * y >= rho - tol; }
};

/// The at-most-three halfplanes describing the convex envelope of
/// { c : |c| >= 1, arg(c) in [lo, hi] }. Empty when the interval is wider
/// than pi and the envelope degenerates to the whole plane.
class CutSet {
 public:
  void push(const Cut& c) { cuts_[size_++] = c; }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const Cut& operator[](int i) const { return cuts_[static_cast<std::size_t>(i)]; }
  const Cut* begin() const { return cuts_.data(); }
  const Cut* end() const { return cuts_.data() + size_; }

 private:
  std::array<Cut, 3> cuts_{};
  int size_ = 0;
};

// Width classification. Equality with pi is detected to 1e-12: at that width
// the two boundary halfplanes coincide and the chord cut is vacuous.
namespace detail {
inline bool wider_than_pi(double width) { return width > std::numbers::pi + 1e-12; }
inline bool width_is_pi(double width) { return std::abs(width - std::numbers::pi) <= 1e-12; }
}  // namespace detail

/// Envelope halfplanes for an argument interval.
///
/// For width < pi the three cuts are the two boundary rays
///   sin(lo) x - cos(lo) y <= 0   and   sin(hi) x - cos(hi) y >= 0
/// plus the chord through the arc endpoints (cos lo, sin lo), (cos hi, sin hi).
/// All cuts are stored in >= form with unit-norm (a, b).
inline CutSet envelope_cuts(const ArgInterval& iv) {
  CutSet cs;
  const double d = iv.width();
  if (detail::wider_than_pi(d)) return cs;
  cs.push({-std::sin(iv.lo), std::cos(iv.lo), 0.0});
  if (detail::width_is_pi(d)) return cs;  // the hi-side cut coincides, chord is vacuous
  cs.push({std::sin(iv.hi), -std::cos(iv.hi), 0.0});
  // Chord midpoint direction; its distance from the origin is cos(d / 2).
  const double mid = iv.midpoint();
  cs.push({std::cos(mid), std::sin(mid), std::cos(0.5 * d)});
  return cs;
}

/// Distance from the origin to the envelope, cos(width / 2). Only defined for
/// widths up to pi; Case I intervals must be handled by the caller (their
/// envelope is the whole plane and the minimum is 0).
inline double min_envelope_norm(const ArgInterval& iv) {
  if (detail::wider_than_pi(iv.width()))
    throw std::invalid_argument("min_envelope_norm needs width <= pi");
  return std::cos(0.5 * iv.width());
}

inline bool contains(const CutSet& cs, double x, double y, double tol) {
  for (const Cut& c : cs)
    if (!c.satisfied(x, y, tol)) return false;
  return true;
}

}  // namespace mcbeam
