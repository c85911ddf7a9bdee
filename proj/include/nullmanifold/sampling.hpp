#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nullmanifold/task.hpp"

namespace nullmanifold {

struct TraversalParams {
  double beta = 0.5;          // tangent step length [rad]
  double eps_proj = 1e-6;     // projection tolerance [task units]
  double gamma = 1.5;         // zigzag overshoot factor, > 1
  int max_steps = 10000;      // outer traversal step budget
  int max_proj_iters = 10;    // inner projection iteration budget
  int termination_skip = 3;   // recent samples excluded from the loop-closure test
  int restarts = 0;           // extra random seeds used to reach other components
  std::uint64_t seed = 0;     // RNG seed (random starts, restarts)

  void validate() const;
};

struct SampleSet {
  std::vector<Configuration> samples;
  std::vector<double> residual_norms;
  std::string method;  // "newton" | "zigzag" | "random_ik"
  double beta = 0.0;
  std::vector<Eigen::VectorXd> family_coordinates;  // empty, or one per sample
  double sampling_seconds = 0.0;
  std::string warning;               // empty when the run completed cleanly
  Eigen::VectorXd initial_tangent;   // sign choice of the first tangent step

  size_t size() const { return samples.size(); }
  void append(const SampleSet& other);
};

// Gauss-Newton solve of r(q) = 0 from q0: minimum-norm SVD step, wrapped after
// each update. Throws convergence_error (with the final residual norm) when
// max_iter updates do not reach tolerance eps.
Configuration gauss_newton_solve(const TaskInstance& task, const Configuration& q0,
                                 double eps, int max_iter = 100);

// Orthonormal basis of the near-null right-singular subspace of jac
// (singular value < tol * sigma_max). Throws degenerate_task_error when empty.
Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& jac, double tol = 1e-6);

// Manifold traversal: tangent step along the null-space direction followed by
// Gauss-Newton projection. Requires an on-manifold start with exactly one
// redundant degree of freedom there.
SampleSet newton_traverse(const TaskInstance& task, const Configuration& q_start,
                          const TraversalParams& params);

// Relaxed traversal: correction steps overshoot by gamma and stop once the
// linearized direction to the manifold flips sign, leaving samples alternating
// across the manifold instead of projected onto it.
SampleSet zigzag_traverse(const TaskInstance& task, const Configuration& q_start,
                          const TraversalParams& params);

// Baseline: n independent Gauss-Newton solves from uniform random starts in
// [-pi, pi)^n. Failed starts are retried with fresh draws, up to 10 n attempts.
SampleSet random_ik_sample(const TaskInstance& task, int n, double eps,
                           std::uint64_t seed);

// newton_traverse / zigzag_traverse from q_start, then from params.restarts
// additional random-start solutions whenever one lands farther than 2 beta from
// every sample collected so far (covers disconnected components).
SampleSet traverse_with_restarts(const TaskInstance& task, const Configuration& q_start,
                                 const TraversalParams& params, const std::string& method);

struct FamilyResult {
  SampleSet samples;                    // concatenated, family-labeled
  std::vector<std::string> instance_log;  // one line per task instance
  int failed_instances = 0;
};

// Newton traversal per family instance, warm-starting each initial solve from
// the previous instance's first sample. Per-instance failures are recorded and
// sampling continues; throws sampling_error only if every instance fails.
FamilyResult sample_family(const std::vector<TaskInstance>& tasks,
                           const TraversalParams& params);

}  // namespace nullmanifold
