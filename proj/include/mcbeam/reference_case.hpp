#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mcbeam/acr_bb.hpp"
#include "mcbeam/problem.hpp"

namespace mcbeam {

/// Built-in regression instance (n = 2, m = 3) with a hand-verified
/// branch-and-bound trace: at eps = 0.1 the solver terminates at iteration 4
/// with objective 0.5072 after branching user 2 three times at midpoints pi,
/// 3 pi / 2 and 5 pi / 4. The channel constants are exact 4-decimal values;
/// an independent active-set enumeration of every subproblem reproduces the
/// expected numbers below to all printed digits.
inline Problem reference_instance() {
  Problem p;
  p.n = 2;
  p.m = 3;
  p.channels.resize(2, 3);
  p.channels.col(0) << std::complex<double>(1.3514, -2.5260),
      std::complex<double>(-0.2938, 1.2571);
  p.channels.col(1) << std::complex<double>(-0.2248, -1.6555),
      std::complex<double>(-0.8479, 0.8655);
  p.channels.col(2) << std::complex<double>(-0.7145, 1.1201),
      std::complex<double>(-0.5890, -0.3075);
  return p;
}

struct ReferenceCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Absolute tolerance for the reference trace, matching its 4-decimal inputs.
inline constexpr double kReferenceTol = 5e-4;

/// Runs the built-in case at eps = 0.1 and compares every traced quantity
/// against its expected value. Returns one entry per checked quantity.
inline std::vector<ReferenceCheck> run_reference_checks(const QpSettings& qs = {}) {
  const double pi = std::numbers::pi;
  const BbResult r = solve_global(reference_instance(), 0.1, {}, qs);

  std::vector<ReferenceCheck> checks;
  auto add = [&checks](const std::string& name, double expected, double actual,
                       double tol = kReferenceTol) {
    checks.push_back({name, expected, actual, tol, std::abs(actual - expected) <= tol});
  };
  auto row = [&r](std::size_t i) -> const IterationRecord* {
    return i < r.trace.size() ? &r.trace[i] : nullptr;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  add("iterations", 4.0, static_cast<double>(r.iterations), 0.0);
  add("u_star", 0.5072, r.u_star);
  add("l_final", 0.4658, r.l_final);
  add("status_converged", 1.0, r.status == BbStatus::Converged ? 1.0 : 0.0, 0.0);

  const IterationRecord* t0 = row(0);
  add("t0.lower", 0.4532, t0 ? t0->lower : nan);
  add("t0.upper", 0.8573, t0 ? t0->upper : nan);

  const IterationRecord* t1 = row(1);
  add("t1.branch_user", 2.0, t1 ? t1->branch_user : nan, 0.0);
  add("t1.split", pi, t1 ? t1->split_point : nan);
  add("t1.left", 0.4825, t1 ? t1->left_value : nan);
  add("t1.right", 0.4532, t1 ? t1->right_value : nan);
  add("t1.upper", 0.8573, t1 ? t1->upper : nan);
  add("t1.gap", 0.8917, t1 ? t1->gap : nan);

  const IterationRecord* t2 = row(2);
  add("t2.branch_user", 2.0, t2 ? t2->branch_user : nan, 0.0);
  add("t2.split", 1.5 * pi, t2 ? t2->split_point : nan);
  add("t2.left", 0.4534, t2 ? t2->left_value : nan);
  add("t2.right", 0.7526, t2 ? t2->right_value : nan);
  add("t2.upper", 0.7811, t2 ? t2->upper : nan);

  const IterationRecord* t3 = row(3);
  add("t3.branch_user", 2.0, t3 ? t3->branch_user : nan, 0.0);
  add("t3.split", 1.25 * pi, t3 ? t3->split_point : nan);
  add("t3.left", 0.4658, t3 ? t3->left_value : nan);
  add("t3.right", 0.5072, t3 ? t3->right_value : nan);
  add("t3.upper", 0.5072, t3 ? t3->upper : nan);

  const IterationRecord* t4 = row(4);
  add("t4.gap", 0.0889, t4 ? t4->gap : nan);
  add("t4.lower", 0.4658, t4 ? t4->lower : nan);
  add("t4.upper", 0.5072, t4 ? t4->upper : nan);

  return checks;
}

}  // namespace mcbeam
