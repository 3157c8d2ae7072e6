#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "gcl/common.hpp"
#include "gcl/rng.hpp"
#include "gcl/robot.hpp"

namespace gcl {

// Configuration- and direction-dependent disturbance family. The
// configuration part couples all joints:
//   eps_c_i(q) = sum_j A_ij * sin(q_j + phi_ij)
// and the direction part is a hysteresis band per joint:
//   eps_d_i = dir_i * (c_i + d_i * |sin q_i|).
struct DisturbanceParams {
  Eigen::MatrixXd coupling_amp;    // A, N*m
  Eigen::MatrixXd coupling_phase;  // phi, rad
  JointVector dir_offset;          // c >= 0, N*m
  JointVector dir_config_amp;      // d >= 0, N*m

  static DisturbanceParams zero(int n) {
    DisturbanceParams p;
    p.coupling_amp = Eigen::MatrixXd::Zero(n, n);
    p.coupling_phase = Eigen::MatrixXd::Zero(n, n);
    p.dir_offset = JointVector::Zero(n);
    p.dir_config_amp = JointVector::Zero(n);
    return p;
  }

  void validate(int n) const {
    if (coupling_amp.rows() != n || coupling_amp.cols() != n ||
        coupling_phase.rows() != n || coupling_phase.cols() != n ||
        dir_offset.size() != n || dir_config_amp.size() != n) {
      throw DimensionError("DisturbanceParams: dimensions must all be " + std::to_string(n));
    }
    if ((dir_offset.array() < 0.0).any() || (dir_config_amp.array() < 0.0).any()) {
      throw ConfigError("DisturbanceParams: dir_offset and dir_config_amp must be >= 0");
    }
  }
};

struct NoiseParams {
  double sigma_q = 0.0;    // rad, position measurement noise std
  double sigma_tau = 0.0;  // N*m, torque measurement noise std

  void validate() const {
    if (sigma_q < 0.0 || sigma_tau < 0.0) throw ConfigError("NoiseParams: stds must be >= 0");
  }
};

struct DriftDynParams {
  JointVector inertia;  // kg*m^2, > 0
  JointVector damping;  // N*m*s/rad, >= 0
  double rate = 500.0;  // Hz
  double duration = 2.0;

  void validate(int n) const {
    if (inertia.size() != n || damping.size() != n) {
      throw DimensionError("DriftDynParams: per-joint vectors must have length " + std::to_string(n));
    }
    if ((inertia.array() <= 0.0).any()) throw ConfigError("DriftDynParams: inertia must be > 0");
    if ((damping.array() < 0.0).any()) throw ConfigError("DriftDynParams: damping must be >= 0");
    if (rate <= 0.0 || duration <= 0.0) throw ConfigError("DriftDynParams: rate and duration must be > 0");
  }
};

// Ground-truth simulated system: gravity plus the disturbance family, with
// measurement noise for sampling and per-joint drift dynamics for the
// online test.
struct Plant {
  RobotModel robot;
  DisturbanceParams disturbance;
  NoiseParams noise;
  DriftDynParams drift;

  int n() const { return robot.n(); }

  void validate() const {
    robot.validate();
    disturbance.validate(robot.n());
    noise.validate();
    drift.validate(robot.n());
  }
};

// Step function of the per-joint direction mask: u(x) = 1 if x > 0 else 0.
inline double step_mask(double x) { return x > 0.0 ? 1.0 : 0.0; }

inline JointVector step_mask(const JointVector& dq) {
  JointVector u(dq.size());
  for (Eigen::Index i = 0; i < dq.size(); ++i) u[i] = step_mask(dq[i]);
  return u;
}

inline JointVector disturbance_config(const DisturbanceParams& d, const JointVector& q) {
  const Eigen::Index n = d.coupling_amp.rows();
  require_dim(q, n, "disturbance_config: q");
  JointVector eps(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      s += d.coupling_amp(i, j) * std::sin(q[j] + d.coupling_phase(i, j));
    }
    eps[i] = s;
  }
  return eps;
}

// dir entries must be exactly +1 or -1. For this family eps_d^+ = -eps_d^-.
inline JointVector disturbance_direction(const DisturbanceParams& d, const JointVector& q,
                                         const JointVector& dir) {
  const Eigen::Index n = d.dir_offset.size();
  require_dim(q, n, "disturbance_direction: q");
  require_dim(dir, n, "disturbance_direction: dir");
  JointVector eps(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dir[i] != 1.0 && dir[i] != -1.0) {
      throw DimensionError("disturbance_direction: dir entries must be +1 or -1");
    }
    eps[i] = dir[i] * (d.dir_offset[i] + d.dir_config_amp[i] * std::abs(std::sin(q[i])));
  }
  return eps;
}

// tau_c = g(q) + eps_c(q) + eps_d^{sign(dq)}(q), composed per joint by the
// step mask of dq.
inline JointVector compensation_torque(const RobotModel& robot, const DisturbanceParams& d,
                                       const JointVector& q, const JointVector& dq) {
  const int n = robot.n();
  require_dim(q, n, "compensation_torque: q");
  require_dim(dq, n, "compensation_torque: dq");
  const JointVector g = gravity_torque(robot, q);
  const JointVector eps_c = disturbance_config(d, q);
  JointVector tau(n);
  for (int i = 0; i < n; ++i) {
    const double band = d.dir_offset[i] + d.dir_config_amp[i] * std::abs(std::sin(q[i]));
    const double u = step_mask(dq[i]);
    tau[i] = g[i] + eps_c[i] + (u * band + (1.0 - u) * (-band));
  }
  return tau;
}

inline JointVector true_compensation_torque(const Plant& p, const JointVector& q,
                                            const JointVector& dq) {
  return compensation_torque(p.robot, p.disturbance, q, dq);
}

struct MeasuredSample {
  JointVector q;    // noisy position
  JointVector dq;   // passed through noiselessly
  JointVector tau;  // noisy compensation torque
};

inline MeasuredSample measure_sample(const Plant& p, const JointVector& q, const JointVector& dq,
                                     Rng& rng) {
  const int n = p.n();
  require_dim(q, n, "measure_sample: q");
  require_dim(dq, n, "measure_sample: dq");
  MeasuredSample m;
  m.q = q;
  m.dq = dq;
  m.tau = true_compensation_torque(p, q, dq);
  for (int i = 0; i < n; ++i) m.q[i] += rng.normal(0.0, p.noise.sigma_q);
  for (int i = 0; i < n; ++i) m.tau[i] += rng.normal(0.0, p.noise.sigma_tau);
  return m;
}

// A feedforward torque policy: (q, per-step dq) -> commanded torque.
using TorquePolicy = std::function<JointVector(const JointVector&, const JointVector&)>;

struct DriftResult {
  JointVector drift_deg;  // per-joint |q(T) - q(0)| in degrees
  double cart_drift_mm = 0.0;
  JointVector q_final;
  int steps = 0;
};

// Semi-implicit Euler integration of the decoupled per-joint dynamics
//   M_i qdd_i = u_i - tau_true_i(q, dq) - b_i qd_i
// starting at rest. The dq seen by both controller and plant is the per-step
// position change, initialized to dq0.
inline DriftResult simulate_drift(const Plant& p, const TorquePolicy& controller,
                                  const JointVector& q0, const JointVector& dq0) {
  const int n = p.n();
  require_dim(q0, n, "simulate_drift: q0");
  require_dim(dq0, n, "simulate_drift: dq0");

  const double dt = 1.0 / p.drift.rate;
  const int steps = static_cast<int>(std::lround(p.drift.duration * p.drift.rate));

  JointVector q = q0;
  JointVector v = JointVector::Zero(n);
  JointVector dq = dq0;
  const Vec3 tip0 = forward_kinematics(p.robot, q0).back().translation();

  for (int k = 0; k < steps; ++k) {
    const JointVector u = controller(q, dq);
    const JointVector tau = true_compensation_torque(p, q, dq);
    const JointVector accel =
        (u - tau - p.drift.damping.cwiseProduct(v)).cwiseQuotient(p.drift.inertia);
    v += dt * accel;
    const JointVector q_next = q + dt * v;
    dq = q_next - q;
    q = q_next;
    if (!q.allFinite() || !v.allFinite()) {
      throw NumericError("simulate_drift: non-finite state at step " + std::to_string(k + 1) +
                         " of " + std::to_string(steps));
    }
  }

  DriftResult r;
  r.drift_deg = (q - q0).cwiseAbs() * (180.0 / kPi);
  r.cart_drift_mm = (forward_kinematics(p.robot, q).back().translation() - tip0).norm() * 1000.0;
  r.q_final = q;
  r.steps = steps;
  return r;
}

}  // namespace gcl
