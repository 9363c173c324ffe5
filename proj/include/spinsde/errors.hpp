#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinsde {

/// Fixed-point iteration of the semi-implicit step ran out of iterations.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A projected step tried to normalize a (near) zero vector.
class DegenerateState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps a step failure with the index of the step that failed.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(std::size_t step_index, bool non_convergence, const std::string& what)
      : std::runtime_error("step " + std::to_string(step_index) + ": " + what),
        step_index_(step_index),
        non_convergence_(non_convergence) {}

  std::size_t step_index() const noexcept { return step_index_; }
  bool non_convergence() const noexcept { return non_convergence_; }

 private:
  std::size_t step_index_;
  bool non_convergence_;
};

/// Bad user input: malformed config, out-of-range parameter, unknown key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinsde
