#include "nullmanifold/kinematics.hpp"

#include <cmath>
#include <numbers>

#include "nullmanifold/errors.hpp"

namespace nullmanifold {

namespace {
constexpr double kPi = std::numbers::pi;
}

double wrap_angle(double a) {
  double r = a - 2.0 * kPi * std::floor((a + kPi) / (2.0 * kPi));
  // floor-based wrap can round onto +pi or just below -pi
  if (r >= kPi) r -= 2.0 * kPi;
  if (r < -kPi) r += 2.0 * kPi;
  return r;
}

Configuration wrap_angles(const Configuration& q) {
  Configuration out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) out[i] = wrap_angle(q[i]);
  return out;
}

double wrapped_distance(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size())
    throw input_error("wrapped_distance: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = wrap_angle(a[i] - b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

void validate_rotation(const Eigen::Matrix3d& rotation) {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if (!gram.isApprox(Eigen::Matrix3d::Identity(), 1e-10))
    throw input_error("rotation matrix is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > 1e-10)
    throw input_error("rotation matrix determinant is not +1");
}

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& axis_angle) {
  const double theta = axis_angle.norm();
  if (theta < 1e-12) return Eigen::Matrix3d::Identity() + skew(axis_angle);
  const Eigen::Vector3d axis = axis_angle / theta;
  return Eigen::AngleAxisd(theta, axis).toRotationMatrix();
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation) {
  const Eigen::Vector3d twice_sin_axis(rotation(2, 1) - rotation(1, 2),
                                       rotation(0, 2) - rotation(2, 0),
                                       rotation(1, 0) - rotation(0, 1));
  const double cos_theta = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  // atan2 stays well conditioned where acos(cos_theta) loses digits
  const double theta = std::atan2(0.5 * twice_sin_axis.norm(), cos_theta);
  if (theta < 1e-12) return Eigen::Vector3d::Zero();
  if (theta > kPi - 1e-6) {
    // Near pi the off-diagonal formula degenerates; recover the axis from the
    // largest diagonal entry of (R + I) / 2 = axis axis^T + O(pi - theta).
    const Eigen::Matrix3d outer = (rotation + Eigen::Matrix3d::Identity()) / 2.0;
    int k = 0;
    outer.diagonal().maxCoeff(&k);
    Eigen::Vector3d axis = outer.col(k) / std::sqrt(outer(k, k));
    axis.normalize();
    // Fix the sign convention via the skew part (zero exactly at pi; then either
    // sign is a valid logarithm).
    if (twice_sin_axis.dot(axis) < 0.0) axis = -axis;
    return theta * axis;
  }
  return (theta / (2.0 * std::sin(theta))) * twice_sin_axis;
}

Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& axis_angle) {
  const double theta = axis_angle.norm();
  const Eigen::Matrix3d w = skew(axis_angle);
  if (theta < 1e-6)
    return Eigen::Matrix3d::Identity() - 0.5 * w + (1.0 / 12.0) * w * w;
  const double sin_theta = std::sin(theta);
  double coeff;
  if (std::abs(sin_theta) < 1e-9) {
    coeff = 1.0 / (theta * theta);  // limit as theta -> pi
  } else {
    coeff = 1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * sin_theta);
  }
  return Eigen::Matrix3d::Identity() - 0.5 * w + coeff * w * w;
}

PlanarChain::PlanarChain(Eigen::VectorXd lengths) : link_lengths(std::move(lengths)) {
  if (link_lengths.size() < 1)
    throw input_error("planar chain needs at least one link");
  if ((link_lengths.array() <= 0.0).any())
    throw input_error("planar link lengths must be positive");
}

Eigen::Vector2d fk_planar(const PlanarChain& chain, const Configuration& q) {
  if (q.size() != chain.link_lengths.size())
    throw input_error("fk_planar: configuration size does not match link count");
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  double angle = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    angle += q[i];
    p.x() += chain.link_lengths[i] * std::cos(angle);
    p.y() += chain.link_lengths[i] * std::sin(angle);
  }
  return p;
}

Eigen::MatrixXd jacobian_planar(const PlanarChain& chain, const Configuration& q) {
  const Eigen::Index n = chain.link_lengths.size();
  if (q.size() != n)
    throw input_error("jacobian_planar: configuration size does not match link count");
  Eigen::VectorXd ls(n), lc(n);
  double angle = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    angle += q[i];
    ls[i] = chain.link_lengths[i] * std::sin(angle);
    lc[i] = chain.link_lengths[i] * std::cos(angle);
  }
  Eigen::MatrixXd jac(2, n);
  double sum_s = 0.0, sum_c = 0.0;
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    sum_s += ls[j];
    sum_c += lc[j];
    jac(0, j) = -sum_s;
    jac(1, j) = sum_c;
  }
  return jac;
}

void KinematicChain::validate() const {
  if (joints.empty()) throw input_error("kinematic chain needs at least one joint");
  for (const auto& joint : joints) {
    if (std::abs(joint.axis.norm() - 1.0) > 1e-12)
      throw input_error("joint axis must have unit norm");
    validate_rotation(joint.origin.rotation);
  }
  validate_rotation(tool.rotation);
}

Pose fk_chain(const KinematicChain& chain, const Configuration& q) {
  if (q.size() != chain.dof())
    throw input_error("fk_chain: configuration size does not match joint count");
  Pose t;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const JointSpec& joint = chain.joints[static_cast<size_t>(i)];
    t = t * joint.origin;
    t = t * Pose{Eigen::AngleAxisd(q[i], joint.axis).toRotationMatrix(),
                 Eigen::Vector3d::Zero()};
  }
  return t * chain.tool;
}

Eigen::MatrixXd jacobian_chain(const KinematicChain& chain, const Configuration& q) {
  const Eigen::Index n = q.size();
  if (n != chain.dof())
    throw input_error("jacobian_chain: configuration size does not match joint count");
  std::vector<Eigen::Vector3d> world_axes(static_cast<size_t>(n));
  std::vector<Eigen::Vector3d> joint_origins(static_cast<size_t>(n));
  Pose t;
  for (Eigen::Index i = 0; i < n; ++i) {
    const JointSpec& joint = chain.joints[static_cast<size_t>(i)];
    t = t * joint.origin;
    world_axes[static_cast<size_t>(i)] = t.rotation * joint.axis;
    joint_origins[static_cast<size_t>(i)] = t.translation;
    t = t * Pose{Eigen::AngleAxisd(q[i], joint.axis).toRotationMatrix(),
                 Eigen::Vector3d::Zero()};
  }
  const Eigen::Vector3d p_ee = (t * chain.tool).translation;
  Eigen::MatrixXd jac(6, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d& w = world_axes[static_cast<size_t>(i)];
    jac.col(i).head<3>() = w.cross(p_ee - joint_origins[static_cast<size_t>(i)]);
    jac.col(i).tail<3>() = w;
  }
  return jac;
}

Eigen::Matrix<double, 6, 1> se3_error(const Pose& current, const Pose& target) {
  Eigen::Matrix<double, 6, 1> err;
  err.head<3>() = current.translation - target.translation;
  err.tail<3>() = so3_log(current.rotation.transpose() * target.rotation);
  return err;
}

}  // namespace nullmanifold
