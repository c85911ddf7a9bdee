#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nullmanifold/kinematics.hpp"

namespace nullmanifold {

enum class TaskKind {
  planar_position,             // planar arm end point, m = 2
  position3,                   // spatial chain tool position, m = 3
  pose6,                       // full tool pose, m = 6
  position_fixed_orientation,  // position target with a fixed tool rotation, m = 6
};

std::string to_string(TaskKind kind);

// Either a planar arm or a spatial chain; exactly one pointer is set.
struct Robot {
  std::shared_ptr<const PlanarChain> planar;
  std::shared_ptr<const KinematicChain> chain;

  int dof() const;
};

// Residual map r(q) = f(q) - target over a fixed robot. Immutable once built.
struct TaskInstance {
  TaskKind kind = TaskKind::planar_position;
  Robot robot;
  Eigen::VectorXd target_position;  // planar_position (2) / position3 (3)
  Pose target_pose;                 // pose6 / position_fixed_orientation
  Eigen::VectorXd family_coordinate;  // empty unless part of a family

  int dof() const { return robot.dof(); }
  int residual_dim() const;
};

TaskInstance make_planar_position_task(std::shared_ptr<const PlanarChain> chain,
                                       const Eigen::Vector2d& target);
TaskInstance make_position3_task(std::shared_ptr<const KinematicChain> chain,
                                 const Eigen::Vector3d& target);
TaskInstance make_pose6_task(std::shared_ptr<const KinematicChain> chain,
                             const Pose& target);
TaskInstance make_fixed_orientation_task(std::shared_ptr<const KinematicChain> chain,
                                         const Eigen::Vector3d& target_position,
                                         const Eigen::Matrix3d& orientation);

Eigen::VectorXd residual(const TaskInstance& task, const Configuration& q);
Eigen::MatrixXd residual_jacobian(const TaskInstance& task, const Configuration& q);

// Tool-down target rotation used for "orientation": "down" task files: tool z
// points along -z, tool x kept along +x.
Eigen::Matrix3d downward_orientation();

struct TaskFamily {
  enum class Kind { line, rectangle };
  Kind kind = Kind::line;
  // line: segment from `from` to `to` in the xy plane at height z.
  // rectangle: axis-aligned region [from.x, to.x] x [from.y, to.y] at height z.
  Eigen::Vector2d from = Eigen::Vector2d::Zero();
  Eigen::Vector2d to = Eigen::Vector2d::Zero();
  double z = 0.0;
  Eigen::Matrix3d orientation = downward_orientation();
  int count = 30;                   // line discretization
  std::array<int, 2> counts{10, 20};  // rectangle discretization (x, y)

  void validate() const;
};

// Equally spaced task instances over the family locus (row-major for
// rectangles). Each instance carries family_coordinate = its target position.
std::vector<TaskInstance> discretize_family(const TaskFamily& family,
                                            std::shared_ptr<const KinematicChain> chain);

}  // namespace nullmanifold
