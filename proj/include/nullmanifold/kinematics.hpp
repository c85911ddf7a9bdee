#pragma once

#include <Eigen/Dense>
#include <vector>

namespace nullmanifold {

// Joint-angle vector. Entries are radians; wrap_angles maps each into [-pi, pi).
using Configuration = Eigen::VectorXd;

double wrap_angle(double a);
Configuration wrap_angles(const Configuration& q);

// Euclidean norm of the per-axis wrapped difference (distance on the joint torus).
double wrapped_distance(const Configuration& a, const Configuration& b);

// Rigid transform, rotation kept as an explicit orthonormal matrix.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Pose operator*(const Pose& rhs) const {
    return Pose{rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
  Pose inverse() const {
    return Pose{rotation.transpose(), -(rotation.transpose() * translation)};
  }
  bool is_approx(const Pose& other, double tol = 1e-10) const {
    return rotation.isApprox(other.rotation, tol) &&
           (translation - other.translation).norm() <= tol;
  }
};

// Throws input_error unless R is orthonormal with det +1 (tol 1e-10).
void validate_rotation(const Eigen::Matrix3d& rotation);

// SO(3) helpers.
Eigen::Matrix3d skew(const Eigen::Vector3d& w);
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& axis_angle);
// Matrix logarithm as an axis-angle vector; handles the angle-pi branch by
// extracting the axis from the largest diagonal entry of (R + I) / 2, and
// returns zero below angle 1e-12.
Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation);
// Inverse of the left Jacobian of SO(3), used to linearize so3_log exactly.
Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& axis_angle);

// Planar N-link arm with revolute joints, links along the local x axis.
struct PlanarChain {
  Eigen::VectorXd link_lengths;

  explicit PlanarChain(Eigen::VectorXd lengths);
  int dof() const { return static_cast<int>(link_lengths.size()); }
};

Eigen::Vector2d fk_planar(const PlanarChain& chain, const Configuration& q);
Eigen::MatrixXd jacobian_planar(const PlanarChain& chain, const Configuration& q);

// Generic spatial serial chain: per joint a fixed parent-to-joint transform
// followed by a rotation of q_i about `axis` (unit vector in the joint frame).
struct JointSpec {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Pose origin;
};

struct KinematicChain {
  std::vector<JointSpec> joints;
  Pose tool;

  void validate() const;
  int dof() const { return static_cast<int>(joints.size()); }
};

Pose fk_chain(const KinematicChain& chain, const Configuration& q);

// Geometric Jacobian, rows = (linear velocity, angular velocity), both world frame.
Eigen::MatrixXd jacobian_chain(const KinematicChain& chain, const Configuration& q);

// Task-space error between two poses: (translation difference,
// axis-angle of current.rotation^T * target.rotation). Zero iff the poses match.
Eigen::Matrix<double, 6, 1> se3_error(const Pose& current, const Pose& target);

}  // namespace nullmanifold
