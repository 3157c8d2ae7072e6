#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gcl/common.hpp"

namespace gcl {

enum class JointKind { Revolute, Prismatic };

// One link of a serial chain. The link's joint frame is
//   parent_frame * offset(offset_xyz, offset_rpy) * motion(q)
// where motion(q) rotates about `axis` for a revolute joint and translates
// along `axis` for a prismatic one. `com` is expressed in the moved frame.
// The offset is kept as raw xyz/rpy numbers so config round trips are
// lossless; the transform is rebuilt on demand.
struct LinkParams {
  JointKind kind = JointKind::Revolute;
  Vec3 axis = Vec3::UnitZ();
  Vec3 offset_xyz = Vec3::Zero();
  Vec3 offset_rpy = Vec3::Zero();  // applied as Rz(yaw)*Ry(pitch)*Rx(roll)
  double mass = 0.0;               // kg, >= 0
  Vec3 com = Vec3::Zero();         // meters, link frame
  double limit_lo = -kPi;
  double limit_hi = kPi;

  Transform offset_transform() const {
    Transform t = Transform::Identity();
    t.translation() = offset_xyz;
    t.linear() = (Eigen::AngleAxisd(offset_rpy.z(), Vec3::UnitZ()) *
                  Eigen::AngleAxisd(offset_rpy.y(), Vec3::UnitY()) *
                  Eigen::AngleAxisd(offset_rpy.x(), Vec3::UnitX()))
                     .toRotationMatrix();
    return t;
  }

  Transform joint_motion(double q) const {
    Transform t = Transform::Identity();
    if (kind == JointKind::Revolute) {
      t.linear() = Eigen::AngleAxisd(q, axis).toRotationMatrix();
    } else {
      t.translation() = q * axis;
    }
    return t;
  }
};

struct RobotModel {
  std::string name = "robot";
  std::vector<LinkParams> links;
  Vec3 gravity_accel = Vec3(0.0, 0.0, -9.81);

  int n() const { return static_cast<int>(links.size()); }

  std::vector<JointKind> kinds() const {
    std::vector<JointKind> k;
    k.reserve(links.size());
    for (const auto& l : links) k.push_back(l.kind);
    return k;
  }

  int num_revolute() const {
    int k = 0;
    for (const auto& l : links)
      if (l.kind == JointKind::Revolute) ++k;
    return k;
  }

  JointVector limits_lo() const {
    JointVector v(n());
    for (int i = 0; i < n(); ++i) v[i] = links[i].limit_lo;
    return v;
  }

  JointVector limits_hi() const {
    JointVector v(n());
    for (int i = 0; i < n(); ++i) v[i] = links[i].limit_hi;
    return v;
  }

  void validate() const {
    if (links.empty()) throw ConfigError("robot '" + name + "': needs at least one link");
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto& l = links[i];
      const std::string where = "robot '" + name + "' link " + std::to_string(i + 1);
      if (l.mass < 0.0) throw ConfigError(where + ": mass must be >= 0");
      if (std::abs(l.axis.norm() - 1.0) > 1e-12) throw ConfigError(where + ": axis must be unit length");
      if (!(l.limit_lo < l.limit_hi)) throw ConfigError(where + ": limits must satisfy lo < hi");
    }
  }
};

// World-frame pose of every link's moved frame. Pose i depends on q[0..i] only.
inline std::vector<Transform> forward_kinematics(const RobotModel& model, const JointVector& q) {
  require_dim(q, model.n(), "forward_kinematics: q");
  std::vector<Transform> frames;
  frames.reserve(model.links.size());
  Transform t = Transform::Identity();
  for (int i = 0; i < model.n(); ++i) {
    t = t * model.links[i].offset_transform() * model.links[i].joint_motion(q[i]);
    frames.push_back(t);
  }
  return frames;
}

// U(q) = -sum_i m_i * g . p_com,i(q). Summation order is fixed (link order) so
// scaling every mass scales U exactly.
inline double potential_energy(const RobotModel& model, const JointVector& q) {
  require_dim(q, model.n(), "potential_energy: q");
  const auto frames = forward_kinematics(model, q);
  double u = 0.0;
  for (int i = 0; i < model.n(); ++i) {
    const Vec3 p = frames[i] * model.links[i].com;
    u += model.links[i].mass * (-model.gravity_accel.dot(p));
  }
  return u;
}

// g(q) = dU/dq: the torque the actuators must apply to hold the arm statically.
// Computed as the Jacobian transpose of per-link COM weight forces; matches
// central finite differences of potential_energy.
inline JointVector gravity_torque(const RobotModel& model, const JointVector& q) {
  require_dim(q, model.n(), "gravity_torque: q");
  const int n = model.n();
  const auto frames = forward_kinematics(model, q);

  std::vector<Vec3> com_world(n);
  for (int i = 0; i < n; ++i) com_world[i] = frames[i] * model.links[i].com;

  // Joint j's world axis and origin sit in the pre-motion frame.
  std::vector<Vec3> axis_world(n), origin_world(n);
  {
    Transform t = Transform::Identity();
    for (int j = 0; j < n; ++j) {
      t = t * model.links[j].offset_transform();
      axis_world[j] = t.linear() * model.links[j].axis;
      origin_world[j] = t.translation();
      t = t * model.links[j].joint_motion(q[j]);
    }
  }

  const Vec3 neg_g = -model.gravity_accel;
  JointVector tau(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = j; i < n; ++i) {
      const Vec3 dp = (model.links[j].kind == JointKind::Revolute)
                          ? Vec3(axis_world[j].cross(com_world[i] - origin_world[j]))
                          : axis_world[j];
      s += model.links[i].mass * neg_g.dot(dp);
    }
    tau[j] = s;
  }
  return tau;
}

}  // namespace gcl
