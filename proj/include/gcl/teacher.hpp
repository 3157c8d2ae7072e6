#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include "gcl/common.hpp"
#include "gcl/dataset.hpp"
#include "gcl/features.hpp"
#include "gcl/plant.hpp"
#include "gcl/robot.hpp"
#include "gcl/robot_io.hpp"
#include "gcl/rng.hpp"
#include "gcl/textio.hpp"

namespace gcl {

// Analytic compensation model with (possibly) perturbed physical parameters.
// Serves as the distillation teacher and as the physics-only baseline.
struct TeacherModel {
  RobotModel robot;
  DisturbanceParams disturbance;
  std::string bias_level = "exact";
  double sigma_p = 0.0;

  int n() const { return robot.n(); }
};

// Every mass, COM coordinate, and disturbance amplitude is scaled by (1 + d),
// d ~ N(0, sigma_p^2), one draw per parameter in a fixed order: per link
// (mass, com x/y/z), then coupling_amp row by row, dir_offset, dir_config_amp.
// Nonnegative parameters are clamped at 0 so the perturbed model stays valid.
inline TeacherModel make_biased_teacher(const Plant& p, double sigma_p, Rng& rng) {
  if (sigma_p < 0.0) throw ConfigError("make_biased_teacher: sigma_p must be >= 0");
  TeacherModel t;
  t.robot = p.robot;
  t.disturbance = p.disturbance;
  t.sigma_p = sigma_p;
  t.bias_level = sigma_p == 0.0 ? "exact" : format_double(sigma_p);

  auto factor = [&]() { return 1.0 + sigma_p * rng.normal(); };
  for (LinkParams& l : t.robot.links) {
    l.mass = std::max(0.0, l.mass * factor());
    for (int c = 0; c < 3; ++c) l.com[c] *= factor();
  }
  DisturbanceParams& d = t.disturbance;
  for (Eigen::Index i = 0; i < d.coupling_amp.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.coupling_amp.cols(); ++j) d.coupling_amp(i, j) *= factor();
  }
  for (Eigen::Index i = 0; i < d.dir_offset.size(); ++i) {
    d.dir_offset[i] = std::max(0.0, d.dir_offset[i] * factor());
  }
  for (Eigen::Index i = 0; i < d.dir_config_amp.size(); ++i) {
    d.dir_config_amp[i] = std::max(0.0, d.dir_config_amp[i] * factor());
  }
  return t;
}

inline JointVector teacher_predict(const TeacherModel& t, const JointVector& q,
                                   const JointVector& dq) {
  return compensation_torque(t.robot, t.disturbance, q, dq);
}

// Noise-free teacher records: q uniform in the joint limits, per-joint dq with
// uniform direction and magnitude in [1e-3, 0.05] rad. Only the sign of dq
// reaches the model, the magnitude range just keeps it clear of the dead zone.
inline Dataset sample_teacher(const TeacherModel& t, int count, const JointVector& limits_lo,
                              const JointVector& limits_hi, Rng& rng) {
  if (count < 1) throw ConfigError("sample_teacher: count must be >= 1");
  const int n = t.n();
  require_dim(limits_lo, n, "sample_teacher: limits_lo");
  require_dim(limits_hi, n, "sample_teacher: limits_hi");
  const std::vector<JointKind> kinds = t.robot.kinds();

  Dataset d;
  d.in_dim = encoded_dim(kinds);
  d.joints = n;
  d.provenance = Provenance::teacher;
  d.samples.reserve(static_cast<std::size_t>(count));
  JointVector q(n), dq(n);
  for (int s = 0; s < count; ++s) {
    for (int i = 0; i < n; ++i) {
      q[i] = rng.uniform(limits_lo[i], limits_hi[i]);
      dq[i] = rng.sign() * rng.uniform(1e-3, 0.05);
    }
    Sample rec;
    rec.x1 = trig_encode(q, kinds);
    rec.x2 = dq;
    rec.y = teacher_predict(t, q, dq);
    d.samples.push_back(std::move(rec));
  }
  return d;
}

inline void save_teacher(const std::string& path, const TeacherModel& t) {
  std::ofstream out = open_output(path);
  out << "gcl-teacher v1\n";
  out << "bias_level " << t.bias_level << "\n";
  out << "sigma_p " << format_double(t.sigma_p) << "\n";
  write_robot(out, t.robot);
  write_disturbance(out, t.disturbance);
  out << "end\n";
  if (!out) throw CorruptFileError("save_teacher: write failed for " + path);
}

inline TeacherModel load_teacher(const std::string& path) {
  std::ifstream in = open_input(path);
  TextReader r(in, path);
  check_format_header(r, "gcl-teacher");
  TeacherModel t;
  {
    const auto tokens = r.require_line("bias_level");
    if (tokens.size() != 2 || tokens[0] != "bias_level") r.fail("expected 'bias_level <tag>'");
    t.bias_level = tokens[1];
  }
  t.sigma_p = detail::expect_numbers(r, "sigma_p", 1)[0];
  t.robot = read_robot(r);
  t.disturbance = read_disturbance(r);
  t.disturbance.validate(t.robot.n());
  expect_end(r);
  return t;
}

}  // namespace gcl
