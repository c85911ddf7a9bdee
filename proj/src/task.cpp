#include "nullmanifold/task.hpp"

#include "nullmanifold/errors.hpp"

namespace nullmanifold {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::planar_position: return "planar_position";
    case TaskKind::position3: return "position3";
    case TaskKind::pose6: return "pose6";
    case TaskKind::position_fixed_orientation: return "position_fixed_orientation";
  }
  return "unknown";
}

int Robot::dof() const {
  if (planar) return planar->dof();
  if (chain) return chain->dof();
  throw input_error("robot has no chain attached");
}

int TaskInstance::residual_dim() const {
  switch (kind) {
    case TaskKind::planar_position: return 2;
    case TaskKind::position3: return 3;
    case TaskKind::pose6:
    case TaskKind::position_fixed_orientation: return 6;
  }
  return 0;
}

TaskInstance make_planar_position_task(std::shared_ptr<const PlanarChain> chain,
                                       const Eigen::Vector2d& target) {
  TaskInstance task;
  task.kind = TaskKind::planar_position;
  task.robot.planar = std::move(chain);
  task.target_position = target;
  return task;
}

TaskInstance make_position3_task(std::shared_ptr<const KinematicChain> chain,
                                 const Eigen::Vector3d& target) {
  TaskInstance task;
  task.kind = TaskKind::position3;
  task.robot.chain = std::move(chain);
  task.target_position = target;
  return task;
}

TaskInstance make_pose6_task(std::shared_ptr<const KinematicChain> chain,
                             const Pose& target) {
  validate_rotation(target.rotation);
  TaskInstance task;
  task.kind = TaskKind::pose6;
  task.robot.chain = std::move(chain);
  task.target_pose = target;
  return task;
}

TaskInstance make_fixed_orientation_task(std::shared_ptr<const KinematicChain> chain,
                                         const Eigen::Vector3d& target_position,
                                         const Eigen::Matrix3d& orientation) {
  validate_rotation(orientation);
  TaskInstance task;
  task.kind = TaskKind::position_fixed_orientation;
  task.robot.chain = std::move(chain);
  task.target_pose = Pose{orientation, target_position};
  return task;
}

Eigen::VectorXd residual(const TaskInstance& task, const Configuration& q) {
  if (q.size() != task.dof())
    throw input_error("residual: configuration size does not match robot dof");
  switch (task.kind) {
    case TaskKind::planar_position:
      return fk_planar(*task.robot.planar, q) -
             Eigen::Vector2d(task.target_position);
    case TaskKind::position3:
      return fk_chain(*task.robot.chain, q).translation -
             Eigen::Vector3d(task.target_position);
    case TaskKind::pose6:
    case TaskKind::position_fixed_orientation:
      return se3_error(fk_chain(*task.robot.chain, q), task.target_pose);
  }
  throw input_error("residual: unknown task kind");
}

Eigen::MatrixXd residual_jacobian(const TaskInstance& task, const Configuration& q) {
  if (q.size() != task.dof())
    throw input_error("residual_jacobian: configuration size does not match robot dof");
  switch (task.kind) {
    case TaskKind::planar_position:
      return jacobian_planar(*task.robot.planar, q);
    case TaskKind::position3:
      return jacobian_chain(*task.robot.chain, q).topRows<3>();
    case TaskKind::pose6:
    case TaskKind::position_fixed_orientation: {
      // Linear rows are the plain geometric Jacobian. The angular residual is
      // e(q) = log(R(q)^T R*), whose exact derivative is
      // de/dt = -Jl(e)^{-1} R(q)^T omega_world.
      const Pose current = fk_chain(*task.robot.chain, q);
      const Eigen::MatrixXd geo = jacobian_chain(*task.robot.chain, q);
      const Eigen::Vector3d err =
          so3_log(current.rotation.transpose() * task.target_pose.rotation);
      Eigen::MatrixXd jac(6, q.size());
      jac.topRows<3>() = geo.topRows<3>();
      jac.bottomRows<3>() = -so3_left_jacobian_inverse(err) *
                            current.rotation.transpose() * geo.bottomRows<3>();
      return jac;
    }
  }
  throw input_error("residual_jacobian: unknown task kind");
}

Eigen::Matrix3d downward_orientation() {
  Eigen::Matrix3d r;
  r << 1.0, 0.0, 0.0,
       0.0, -1.0, 0.0,
       0.0, 0.0, -1.0;
  return r;
}

void TaskFamily::validate() const {
  if (kind == Kind::line) {
    if (count < 2) throw input_error("line family needs at least 2 points");
    if ((to - from).norm() <= 0.0) throw input_error("line family endpoints coincide");
  } else {
    if (counts[0] < 2 || counts[1] < 2)
      throw input_error("rectangle family needs at least 2 points per axis");
    if (!(from.x() < to.x()) || !(from.y() < to.y()))
      throw input_error("rectangle family bounds must satisfy min < max");
  }
  validate_rotation(orientation);
}

std::vector<TaskInstance> discretize_family(const TaskFamily& family,
                                            std::shared_ptr<const KinematicChain> chain) {
  family.validate();
  std::vector<TaskInstance> tasks;
  if (family.kind == TaskFamily::Kind::line) {
    tasks.reserve(static_cast<size_t>(family.count));
    for (int i = 0; i < family.count; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(family.count - 1);
      const Eigen::Vector2d xy = family.from + s * (family.to - family.from);
      const Eigen::Vector3d p(xy.x(), xy.y(), family.z);
      TaskInstance task = make_fixed_orientation_task(chain, p, family.orientation);
      task.family_coordinate = p;
      tasks.push_back(std::move(task));
    }
  } else {
    const int nx = family.counts[0];
    const int ny = family.counts[1];
    tasks.reserve(static_cast<size_t>(nx) * static_cast<size_t>(ny));
    for (int ix = 0; ix < nx; ++ix) {
      const double sx = static_cast<double>(ix) / static_cast<double>(nx - 1);
      const double x = family.from.x() + sx * (family.to.x() - family.from.x());
      for (int iy = 0; iy < ny; ++iy) {
        const double sy = static_cast<double>(iy) / static_cast<double>(ny - 1);
        const double y = family.from.y() + sy * (family.to.y() - family.from.y());
        const Eigen::Vector3d p(x, y, family.z);
        TaskInstance task = make_fixed_orientation_task(chain, p, family.orientation);
        task.family_coordinate = p;
        tasks.push_back(std::move(task));
      }
    }
  }
  return tasks;
}

}  // namespace nullmanifold
