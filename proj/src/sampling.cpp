#include "nullmanifold/sampling.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "nullmanifold/errors.hpp"

namespace nullmanifold {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Minimum-norm least-squares solution of jac * x = rhs; singular values below
// 1e-8 * sigma_max are truncated.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& jac, const Eigen::VectorXd& rhs) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = 1e-8 * (sv.size() > 0 ? sv[0] : 0.0);
  Eigen::VectorXd projected = svd.matrixU().transpose() * rhs;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    projected[i] = sv[i] > cutoff && sv[i] > 0.0 ? projected[i] / sv[i] : 0.0;
  return svd.matrixV() * projected;
}

Configuration draw_uniform(std::mt19937_64& rng, int dims) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Configuration q(dims);
  for (int i = 0; i < dims; ++i) q[i] = u(rng);
  return q;
}

// Zigzag inner loop: overshoot corrections q <- q + gamma * d with d = -J# r,
// stopping when the correction direction flips sign across the manifold.
Configuration zigzag_correct(const TaskInstance& task, const Configuration& q_tilde,
                             const TraversalParams& params) {
  Configuration q = q_tilde;
  Eigen::VectorXd r = residual(task, q);
  if (r.norm() <= params.eps_proj) return q;
  Eigen::VectorXd dir = pinv_solve(residual_jacobian(task, q), -r);
  for (int iter = 0; iter < params.max_proj_iters; ++iter) {
    const Configuration q_next = wrap_angles(q + params.gamma * dir);
    const Eigen::VectorXd r_next = residual(task, q_next);
    const Eigen::VectorXd dir_next = pinv_solve(residual_jacobian(task, q_next), -r_next);
    q = q_next;
    if (dir.dot(dir_next) < 0.0) break;  // crossed to the other side
    if (r_next.norm() <= params.eps_proj) break;
    dir = dir_next;
  }
  return q;
}

enum class Method { newton, zigzag };

SampleSet traverse(const TaskInstance& task, const Configuration& q_start,
                   const TraversalParams& params, Method method) {
  params.validate();
  const auto t0 = Clock::now();

  Configuration q = wrap_angles(q_start);
  {
    const double r0 = residual(task, q).norm();
    if (r0 > params.eps_proj)
      throw input_error("traversal start is off the manifold (|r| = " +
                        std::to_string(r0) + ")");
  }
  {
    const Eigen::MatrixXd basis = null_space_basis(residual_jacobian(task, q));
    if (basis.cols() != 1)
      throw degenerate_task_error(
          "traversal requires exactly one redundant dof at the start, got " +
          std::to_string(basis.cols()));
  }

  SampleSet out;
  out.method = method == Method::newton ? "newton" : "zigzag";
  out.beta = params.beta;
  out.samples.push_back(q);
  out.residual_norms.push_back(residual(task, q).norm());

  Eigen::VectorXd v_prev;
  for (int step = 0; step < params.max_steps; ++step) {
    Eigen::MatrixXd basis;
    try {
      basis = null_space_basis(residual_jacobian(task, q));
    } catch (const degenerate_task_error&) {
      out.warning = "null space vanished at step " + std::to_string(step);
      break;
    }
    if (basis.cols() != 1) {
      out.warning = "null-space dimension jumped to " + std::to_string(basis.cols()) +
                    " at step " + std::to_string(step);
      break;
    }
    Eigen::VectorXd v = basis.col(0);
    if (v_prev.size() > 0 && v_prev.dot(v) < 0.0) v = -v;
    if (v_prev.size() == 0) out.initial_tangent = v;

    const Configuration predicted = wrap_angles(q + params.beta * v);
    Configuration corrected;
    if (method == Method::newton) {
      try {
        corrected = gauss_newton_solve(task, predicted, params.eps_proj,
                                       params.max_proj_iters);
      } catch (const convergence_error& e) {
        out.warning = "projection failed at step " + std::to_string(step) +
                      " (|r| = " + std::to_string(e.residual_norm()) + ")";
        break;
      }
    } else {
      corrected = zigzag_correct(task, predicted, params);
    }
    corrected = wrap_angles(corrected);

    out.samples.push_back(corrected);
    out.residual_norms.push_back(residual(task, corrected).norm());
    v_prev = v;
    q = corrected;

    // Loop closure: an earlier sample (excluding the most recent
    // termination_skip ones) lies within beta of the current sample.
    const size_t count = out.samples.size();
    const size_t skip = static_cast<size_t>(params.termination_skip);
    bool closed = false;
    for (size_t i = 0; i + 1 + skip < count; ++i) {
      if (wrapped_distance(q, out.samples[i]) < params.beta) {
        closed = true;
        break;
      }
    }
    if (closed) break;
  }

  out.sampling_seconds = seconds_since(t0);
  return out;
}

}  // namespace

void TraversalParams::validate() const {
  if (beta <= 0.0) throw input_error("beta must be positive");
  if (eps_proj <= 0.0) throw input_error("eps_proj must be positive");
  if (gamma <= 1.0) throw input_error("gamma must be greater than 1");
  if (max_steps < 1) throw input_error("max_steps must be at least 1");
  if (max_proj_iters < 1) throw input_error("max_proj_iters must be at least 1");
  if (termination_skip < 1) throw input_error("termination_skip must be at least 1");
  if (restarts < 0) throw input_error("restarts must be nonnegative");
}

void SampleSet::append(const SampleSet& other) {
  if (!other.family_coordinates.empty() &&
      other.family_coordinates.size() != other.samples.size())
    throw input_error("SampleSet::append: family label count mismatch");
  if (family_coordinates.empty() && !other.family_coordinates.empty())
    family_coordinates.resize(samples.size());
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
  residual_norms.insert(residual_norms.end(), other.residual_norms.begin(),
                        other.residual_norms.end());
  if (!family_coordinates.empty() || !other.family_coordinates.empty()) {
    if (other.family_coordinates.empty()) {
      family_coordinates.resize(samples.size());
    } else {
      family_coordinates.insert(family_coordinates.end(),
                                other.family_coordinates.begin(),
                                other.family_coordinates.end());
    }
  }
  sampling_seconds += other.sampling_seconds;
  if (!other.warning.empty())
    warning = warning.empty() ? other.warning : warning + "; " + other.warning;
  if (initial_tangent.size() == 0) initial_tangent = other.initial_tangent;
}

Configuration gauss_newton_solve(const TaskInstance& task, const Configuration& q0,
                                 double eps, int max_iter) {
  if (eps <= 0.0) throw input_error("gauss_newton_solve: tolerance must be positive");
  Configuration q = q0;
  Eigen::VectorXd r = residual(task, q);
  if (r.norm() <= eps) return q;
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd step = pinv_solve(residual_jacobian(task, q), -r);
    q = wrap_angles(q + step);
    r = residual(task, q);
    if (r.norm() <= eps) return q;
  }
  throw convergence_error("gauss_newton_solve: no convergence after " +
                              std::to_string(max_iter) + " iterations",
                          r.norm());
}

Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& jac, double tol) {
  if (jac.size() == 0) throw input_error("null_space_basis: empty matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const Eigen::Index n = jac.cols();
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = i < sv.size() ? sv[i] : 0.0;
    if (smax == 0.0 || s < tol * smax) null_cols.push_back(i);
  }
  if (null_cols.empty())
    throw degenerate_task_error("jacobian has full column rank: no null space");
  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(null_cols.size()));
  for (size_t j = 0; j < null_cols.size(); ++j)
    basis.col(static_cast<Eigen::Index>(j)) = svd.matrixV().col(null_cols[j]);
  return basis;
}

SampleSet newton_traverse(const TaskInstance& task, const Configuration& q_start,
                          const TraversalParams& params) {
  return traverse(task, q_start, params, Method::newton);
}

SampleSet zigzag_traverse(const TaskInstance& task, const Configuration& q_start,
                          const TraversalParams& params) {
  return traverse(task, q_start, params, Method::zigzag);
}

SampleSet random_ik_sample(const TaskInstance& task, int n, double eps,
                           std::uint64_t seed) {
  if (n < 1) throw input_error("random_ik_sample: n must be at least 1");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  SampleSet out;
  out.method = "random_ik";
  const long budget = 10L * n;
  long attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    if (attempts >= budget)
      throw sampling_error("random_ik_sample: retry budget of " +
                           std::to_string(budget) + " attempts exhausted");
    ++attempts;
    const Configuration start = draw_uniform(rng, task.dof());
    Configuration q;
    try {
      q = gauss_newton_solve(task, start, eps);
    } catch (const convergence_error&) {
      continue;
    }
    q = wrap_angles(q);
    out.samples.push_back(q);
    out.residual_norms.push_back(residual(task, q).norm());
  }
  out.sampling_seconds = seconds_since(t0);
  return out;
}

SampleSet traverse_with_restarts(const TaskInstance& task, const Configuration& q_start,
                                 const TraversalParams& params,
                                 const std::string& method) {
  const Method m = method == "zigzag" ? Method::zigzag : Method::newton;
  SampleSet out = traverse(task, q_start, params, m);
  if (params.restarts <= 0) return out;

  std::mt19937_64 rng(params.seed);
  for (int attempt = 0; attempt < params.restarts; ++attempt) {
    const Configuration start = draw_uniform(rng, task.dof());
    Configuration solution;
    try {
      solution = gauss_newton_solve(task, start, params.eps_proj);
    } catch (const convergence_error&) {
      continue;
    }
    solution = wrap_angles(solution);
    double nearest = std::numeric_limits<double>::infinity();
    for (const Configuration& s : out.samples)
      nearest = std::min(nearest, wrapped_distance(solution, s));
    if (nearest <= 2.0 * params.beta) continue;  // already-covered component
    try {
      out.append(traverse(task, solution, params, m));
    } catch (const degenerate_task_error&) {
      continue;
    } catch (const input_error&) {
      continue;
    }
  }
  return out;
}

FamilyResult sample_family(const std::vector<TaskInstance>& tasks,
                           const TraversalParams& params) {
  if (tasks.empty()) throw input_error("sample_family: no task instances");
  params.validate();

  FamilyResult result;
  result.samples.method = "newton";
  result.samples.beta = params.beta;

  std::mt19937_64 rng(params.seed);
  Configuration warm_start;
  for (size_t i = 0; i < tasks.size(); ++i) {
    const TaskInstance& task = tasks[i];
    Configuration seed_config;
    bool seeded = false;
    if (warm_start.size() == task.dof()) {
      try {
        seed_config = gauss_newton_solve(task, warm_start, params.eps_proj);
        seeded = true;
      } catch (const convergence_error&) {
      }
    }
    for (int attempt = 0; !seeded && attempt < 10; ++attempt) {
      try {
        seed_config = gauss_newton_solve(task, draw_uniform(rng, task.dof()),
                                         params.eps_proj);
        seeded = true;
      } catch (const convergence_error&) {
      }
    }
    if (!seeded) {
      ++result.failed_instances;
      result.instance_log.push_back("instance " + std::to_string(i) +
                                    ": initial solve failed");
      continue;
    }

    TraversalParams instance_params = params;
    instance_params.seed = params.seed + 0x9e3779b97f4a7c15ULL * (i + 1);
    SampleSet run;
    try {
      run = traverse_with_restarts(task, seed_config, instance_params, "newton");
    } catch (const std::runtime_error& e) {
      ++result.failed_instances;
      result.instance_log.push_back("instance " + std::to_string(i) +
                                    ": traversal failed (" + e.what() + ")");
      continue;
    }

    warm_start = run.samples.front();
    run.family_coordinates.assign(run.samples.size(), task.family_coordinate);
    result.instance_log.push_back(
        "instance " + std::to_string(i) + ": " + std::to_string(run.size()) +
        " samples" + (run.warning.empty() ? "" : " [" + run.warning + "]"));
    result.samples.append(run);
  }

  if (result.samples.samples.empty())
    throw sampling_error("sample_family: every instance failed");
  return result;
}

}  // namespace nullmanifold
