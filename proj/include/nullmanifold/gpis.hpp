#pragma once

#include <vector>

#include "nullmanifold/sampling.hpp"

namespace nullmanifold {

// Squared-exponential kernel exp(-|q - q'|^2 / (2 l^2)), in (0, 1].
double se_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double lengthscale);

// Shifted-mean Gaussian-process implicit surface over manifold samples: the
// field value is ~1 on the manifold and decays with configuration-space
// distance from it. Immutable after construction.
struct GpisModel {
  Eigen::MatrixXd train_points;  // N x n, one configuration per row
  Eigen::VectorXd alpha;         // solves (K + noise I) alpha = 1
  double lengthscale = 0.4;
  double noise = 1e-6;                 // sigma^2
  double membership_threshold = 0.995;

  int point_count() const { return static_cast<int>(train_points.rows()); }
  int dims() const { return static_cast<int>(train_points.cols()); }
};

inline constexpr double kDefaultLengthscale = 0.4;
inline constexpr double kDefaultNoise = 1e-6;
inline constexpr double kDefaultMembershipThreshold = 0.995;

// Assembles the Gram matrix and solves (K + noise I) alpha = 1 by Cholesky
// factorization. On factorization failure the diagonal jitter escalates from
// 1e-10 by factors of 10 up to 1e-4 before a numerical_error is thrown.
GpisModel build_model(const SampleSet& samples, double lengthscale = kDefaultLengthscale,
                      double noise = kDefaultNoise,
                      double membership_threshold = kDefaultMembershipThreshold);
GpisModel build_model(const std::vector<Configuration>& points, double lengthscale,
                      double noise, double membership_threshold);

// Field value phi(q) = k(train, q)^T alpha.
double infer(const GpisModel& model, const Eigen::VectorXd& q);

// Analytic field gradient sum_i alpha_i k(q_i, q) (q_i - q) / l^2 (ascends
// toward the manifold).
Eigen::VectorXd gradient(const GpisModel& model, const Eigen::VectorXd& q);

// Distance-like field sqrt(max(0, -2 l^2 log phi)); 0 wherever phi >= 1.
double distance(const GpisModel& model, const Eigen::VectorXd& q);
double distance_from_phi(const GpisModel& model, double phi);

bool is_on_manifold(const GpisModel& model, const Eigen::VectorXd& q);

// One-step move onto the manifold: q + d(q) * grad/|grad|, wrapped. Returns q
// unchanged when d(q) = 0; throws degenerate_query_error on vanishing gradient.
Configuration project(const GpisModel& model, const Configuration& q);

// Iterated projection with per-step displacement capped at step_cap, until
// d <= tol or 100 steps. Returns the visited sequence including q0. Throws
// stall_error when d fails to decrease across 5 consecutive steps.
std::vector<Configuration> path_to_manifold(const GpisModel& model,
                                            const Configuration& q0, double step_cap,
                                            double tol);

}  // namespace nullmanifold
