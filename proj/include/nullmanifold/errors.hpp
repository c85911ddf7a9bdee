#pragma once

#include <stdexcept>
#include <string>

namespace nullmanifold {

// Bad user input: dimension mismatches, malformed files, out-of-range parameters.
class input_error : public std::runtime_error {
public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solve did not reach the requested tolerance.
class convergence_error : public std::runtime_error {
public:
  convergence_error(const std::string& what, double residual_norm)
      : std::runtime_error(what), residual_norm_(residual_norm) {}
  double residual_norm() const { return residual_norm_; }

private:
  double residual_norm_;
};

// Task has no null space where one is required.
class degenerate_task_error : public std::runtime_error {
public:
  explicit degenerate_task_error(const std::string& what) : std::runtime_error(what) {}
};

// Query point where the requested field operation is undefined (e.g. vanishing gradient).
class degenerate_query_error : public std::runtime_error {
public:
  explicit degenerate_query_error(const std::string& what) : std::runtime_error(what) {}
};

// Sampling process could not produce the requested set.
class sampling_error : public std::runtime_error {
public:
  explicit sampling_error(const std::string& what) : std::runtime_error(what) {}
};

// Linear-algebra failure (non-PD Gram matrix after jitter escalation, ...).
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Iteration stopped making progress.
class stall_error : public std::runtime_error {
public:
  explicit stall_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nullmanifold
