#include "nullmanifold/gpis.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "nullmanifold/errors.hpp"
#include "nullmanifold/parallel.hpp"

namespace nullmanifold {

double se_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double lengthscale) {
  if (lengthscale <= 0.0) throw input_error("se_kernel: lengthscale must be positive");
  if (a.size() != b.size()) throw input_error("se_kernel: dimension mismatch");
  return std::exp(-(a - b).squaredNorm() / (2.0 * lengthscale * lengthscale));
}

GpisModel build_model(const std::vector<Configuration>& points, double lengthscale,
                      double noise, double membership_threshold) {
  if (points.empty()) throw input_error("build_model: no training points");
  if (lengthscale <= 0.0) throw input_error("build_model: lengthscale must be positive");
  if (noise < 0.0) throw input_error("build_model: noise must be nonnegative");
  if (membership_threshold <= 0.0 || membership_threshold >= 1.0)
    throw input_error("build_model: membership threshold must lie in (0, 1)");

  const Eigen::Index count = static_cast<Eigen::Index>(points.size());
  const Eigen::Index dims = points.front().size();
  GpisModel model;
  model.lengthscale = lengthscale;
  model.noise = noise;
  model.membership_threshold = membership_threshold;
  model.train_points.resize(count, dims);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (points[static_cast<size_t>(i)].size() != dims)
      throw input_error("build_model: inconsistent point dimensions");
    if (!points[static_cast<size_t>(i)].allFinite())
      throw input_error("build_model: non-finite training point");
    model.train_points.row(i) = points[static_cast<size_t>(i)].transpose();
  }

  const double inv_two_l2 = 1.0 / (2.0 * lengthscale * lengthscale);
  Eigen::MatrixXd gram(count, count);
  parallel_for(static_cast<size_t>(count), [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const auto row = model.train_points.row(static_cast<Eigen::Index>(i));
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
      for (Eigen::Index j = static_cast<Eigen::Index>(i) + 1; j < count; ++j) {
        const double d2 = (row - model.train_points.row(j)).squaredNorm();
        gram(static_cast<Eigen::Index>(i), j) = std::exp(-d2 * inv_two_l2);
      }
    }
  });
  gram.diagonal().array() += noise;
  gram = gram.selfadjointView<Eigen::Upper>();

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(count);
  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd regularized = gram;
    if (jitter > 0.0) regularized.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(regularized);
    if (llt.info() == Eigen::Success) {
      model.alpha = llt.solve(ones);
      const double defect = (regularized * model.alpha - ones).lpNorm<Eigen::Infinity>();
      if (defect <= 1e-8) return model;
    }
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-4)
      throw numerical_error("build_model: Gram matrix not positive definite after jitter escalation");
  }
}

GpisModel build_model(const SampleSet& samples, double lengthscale, double noise,
                      double membership_threshold) {
  return build_model(samples.samples, lengthscale, noise, membership_threshold);
}

double infer(const GpisModel& model, const Eigen::VectorXd& q) {
  if (q.size() != model.dims()) throw input_error("infer: query dimension mismatch");
  const double inv_two_l2 = 1.0 / (2.0 * model.lengthscale * model.lengthscale);
  double phi = 0.0;
  for (Eigen::Index i = 0; i < model.train_points.rows(); ++i) {
    const double d2 = (model.train_points.row(i).transpose() - q).squaredNorm();
    phi += model.alpha[i] * std::exp(-d2 * inv_two_l2);
  }
  return phi;
}

Eigen::VectorXd gradient(const GpisModel& model, const Eigen::VectorXd& q) {
  if (q.size() != model.dims()) throw input_error("gradient: query dimension mismatch");
  const double l2 = model.lengthscale * model.lengthscale;
  const double inv_two_l2 = 1.0 / (2.0 * l2);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(q.size());
  for (Eigen::Index i = 0; i < model.train_points.rows(); ++i) {
    const Eigen::VectorXd diff = model.train_points.row(i).transpose() - q;
    grad += model.alpha[i] * std::exp(-diff.squaredNorm() * inv_two_l2) * diff / l2;
  }
  return grad;
}

double distance_from_phi(const GpisModel& model, double phi) {
  const double clamped = std::max(phi, 1e-300);
  const double l2 = model.lengthscale * model.lengthscale;
  return std::sqrt(std::max(0.0, -2.0 * l2 * std::log(clamped)));
}

double distance(const GpisModel& model, const Eigen::VectorXd& q) {
  return distance_from_phi(model, infer(model, q));
}

bool is_on_manifold(const GpisModel& model, const Eigen::VectorXd& q) {
  return infer(model, q) > model.membership_threshold;
}

Configuration project(const GpisModel& model, const Configuration& q) {
  const double dist = distance(model, q);
  if (dist == 0.0) return q;
  const Eigen::VectorXd grad = gradient(model, q);
  const double grad_norm = grad.norm();
  if (grad_norm <= 1e-12)
    throw degenerate_query_error("project: field gradient vanishes at the query");
  return wrap_angles(q + dist * grad / grad_norm);
}

std::vector<Configuration> path_to_manifold(const GpisModel& model,
                                            const Configuration& q0, double step_cap,
                                            double tol) {
  if (step_cap <= 0.0) throw input_error("path_to_manifold: step_cap must be positive");
  if (tol < 0.0) throw input_error("path_to_manifold: tol must be nonnegative");

  std::vector<Configuration> path{q0};
  Configuration q = q0;
  double dist = distance(model, q);
  double best = dist;
  int stalled_steps = 0;
  for (int step = 0; step < 100 && dist > tol; ++step) {
    const Eigen::VectorXd grad = gradient(model, q);
    const double grad_norm = grad.norm();
    if (grad_norm <= 1e-12)
      throw degenerate_query_error("path_to_manifold: field gradient vanishes");
    Eigen::VectorXd move = dist * grad / grad_norm;
    if (move.norm() > step_cap) move *= step_cap / move.norm();
    q = wrap_angles(q + move);
    path.push_back(q);
    dist = distance(model, q);
    if (dist < best) {
      best = dist;
      stalled_steps = 0;
    } else if (++stalled_steps >= 5) {
      throw stall_error("path_to_manifold: distance stopped decreasing");
    }
  }
  return path;
}

}  // namespace nullmanifold
