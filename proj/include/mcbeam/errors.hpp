#pragma once

#include <stdexcept>
#include <string>

namespace mcbeam {

/// Thrown by scale_to_feasible when min_k |c_k| is below the numerical floor.
class DegenerateScale : public std::runtime_error {
 public:
  explicit DegenerateScale(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when every randomized candidate had to be discarded, even after
/// deterministic sub-seed retries.
class AllDegenerate : public std::runtime_error {
 public:
  explicit AllDegenerate(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcbeam
