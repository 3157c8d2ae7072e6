#pragma once

#include <cstdint>

#include "gcl/config.hpp"
#include "gcl/plant.hpp"
#include "gcl/robot.hpp"
#include "gcl/rng.hpp"

namespace gcl {

// Built-in desk-scale 6R arm. Every axis stays near horizontal (alternating
// pitch/roll) and every link's center of mass sits on a lateral lever, so
// each joint carries a substantial gravity torque over the whole limit range.
// Keeping joint torques bounded away from zero matters because the offline
// metric is relative: torques that cross zero make percent errors unbounded
// no matter how accurate a model is.
inline RobotModel desk_robot() {
  RobotModel r;
  r.name = "desk6r";
  r.gravity_accel = Vec3(0.0, 0.0, -9.81);
  auto link = [](Vec3 axis, Vec3 xyz, double mass, Vec3 com, double lo, double hi) {
    LinkParams l;
    l.kind = JointKind::Revolute;
    l.axis = axis;
    l.offset_xyz = xyz;
    l.offset_rpy = Vec3::Zero();
    l.mass = mass;
    l.com = com;
    l.limit_lo = lo;
    l.limit_hi = hi;
    return l;
  };
  r.links = {
      link({0, 1, 0}, {0.00, 0.00, 0.150}, 2.20, {0.10, 0.00, 0.055}, -0.35, 0.38),
      link({1, 0, 0}, {0.18, 0.00, 0.020}, 1.70, {0.08, 0.10, 0.055}, -0.30, 0.32),
      link({0, 1, 0}, {0.16, 0.05, 0.000}, 1.20, {0.10, 0.00, 0.050}, -0.26, 0.24),
      link({1, 0, 0}, {0.14, 0.00, 0.020}, 0.90, {0.05, 0.10, 0.050}, -0.25, 0.26),
      link({0, 1, 0}, {0.10, 0.04, 0.000}, 0.80, {0.10, 0.00, 0.055}, -0.18, 0.19),
      link({1, 0, 0}, {0.08, 0.00, 0.015}, 0.90, {0.03, 0.13, 0.070}, -0.15, 0.16),
  };
  r.validate();
  return r;
}

// Dense cross-joint disturbance drawn once from a fixed internal seed, so the
// preset is the same numbers everywhere without hardcoding 84 constants.
// Each row is scaled to its joint's gravity-torque scale: coupling and
// direction bands are a 5..25% effect on every joint rather than drowning the
// wrist or vanishing at the shoulder.
inline DisturbanceParams desk_disturbance() {
  const int n = 6;
  const double scale[6] = {1.6, 0.55, 0.50, 0.16, 0.11, 0.07};
  Rng rng(0x6465736b36720001ull);
  DisturbanceParams d = DisturbanceParams::zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d.coupling_amp(i, j) = scale[i] * rng.uniform(-0.25, 0.25);
      d.coupling_phase(i, j) = rng.uniform(-kPi, kPi);
    }
  }
  for (int i = 0; i < n; ++i) d.dir_offset[i] = scale[i] * rng.uniform(0.5, 1.0);
  for (int i = 0; i < n; ++i) d.dir_config_amp[i] = scale[i] * rng.uniform(0.3, 0.7);
  return d;
}

// sigma_tau models a coarse motor-current torque estimate rather than a load
// cell: 45% of the mean per-joint standard deviation of the true compensation
// torque over the desk workspace (0.78 N*m, measured once and frozen here).
// Against the per-joint torque medians it spans 1% (shoulder) to 32% (wrist).
inline NoiseParams desk_noise() {
  NoiseParams p;
  p.sigma_q = 0.002;
  p.sigma_tau = 0.35;
  return p;
}

inline DriftDynParams desk_drift() {
  DriftDynParams d;
  d.inertia = (JointVector(6) << 0.30, 0.22, 0.10, 0.035, 0.020, 0.012).finished();
  d.damping = JointVector::Constant(6, 0.5);
  d.rate = 500.0;
  d.duration = 2.0;
  return d;
}

inline Plant desk_plant() {
  Plant p;
  p.robot = desk_robot();
  p.disturbance = desk_disturbance();
  p.noise = desk_noise();
  p.drift = desk_drift();
  p.validate();
  return p;
}

// Reduced step budget sized for a single laptop core. The budget is short on
// purpose: training stays in the noise-averaging regime, where the teacher's
// record pool still pays off, instead of grinding every run to the same
// converged floor.
inline TrainHyper desk_hyper(std::uint64_t seed = 0) {
  TrainHyper h;
  h.max_steps = 1500;
  h.batch_size = 128;
  h.check_interval = 200;
  h.patience = 10;
  h.seed = seed;
  return h;
}

inline ExperimentConfig desk_config(std::uint64_t seed = 12345) {
  ExperimentConfig c;
  c.robot_path = "desk6r.robot";
  c.robot = desk_robot();
  c.disturbance = desk_disturbance();
  c.noise = desk_noise();
  c.drift = desk_drift();
  c.sigma_p_low = 0.05;
  c.sigma_p_high = 0.30;
  c.sampling = SamplingMode::random;
  c.train_count = 1000;
  c.val_count = 2000;
  c.test_count = 300;
  c.train = desk_hyper(seed);
  c.gcc = GccParams::defaults(6);
  c.curve_t_s = {10, 50, 200, 1000, 5000};
  c.curve_seeds = 5;
  c.drift_points = 100;
  c.out_dir = "out";
  c.seed = seed;
  c.validate();
  return c;
}

}  // namespace gcl
