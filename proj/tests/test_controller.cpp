#include "gcl/controller.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "gcl/presets.hpp"
#include "test_util.hpp"

using namespace gcl;
using testutil::expect_close;
using testutil::random_dq;

namespace {

// A random (untrained) but well-formed model: controller algebra must hold for
// any parameters, not just trained ones.
CompensationModel random_model(std::uint64_t seed) {
  const RobotModel robot = desk_robot();
  CompensationModel m;
  m.robot_name = robot.name;
  m.kinds = robot.kinds();
  Rng rng(seed);
  m.w_plus = init_mlp({12, 30, 30, 30, 6}, rng);
  m.w_minus = init_mlp({12, 30, 30, 30, 6}, rng);
  for (auto& b : m.w_plus.biases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-0.2, 0.2);
  }
  m.norm.mu_in = Eigen::VectorXd::Zero(12);
  m.norm.sigma_in = Eigen::VectorXd::Ones(12);
  m.norm.mu_out = Eigen::VectorXd::Zero(6);
  m.norm.sigma_out = Eigen::VectorXd::Ones(6);
  for (int i = 0; i < 12; ++i) m.norm.mu_in[i] = rng.uniform(-0.3, 0.3);
  for (int i = 0; i < 12; ++i) m.norm.sigma_in[i] = rng.uniform(0.5, 1.5);
  for (int i = 0; i < 6; ++i) m.norm.mu_out[i] = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < 6; ++i) m.norm.sigma_out[i] = rng.uniform(0.5, 2.0);
  m.validate();
  return m;
}

JointVector random_config(const RobotModel& m, Rng& rng) {
  return testutil::random_config(m, rng);
}

}  // namespace

TEST(SplitTorques, HandExample) {
  Eigen::VectorXd plus(1), minus(1);
  plus << 2.0;
  minus << 0.0;
  const auto [c, d] = split_torques(plus, minus);
  EXPECT_EQ(c[0], 1.0);
  EXPECT_EQ(d[0], 1.0);
}

TEST(SplitTorques, EqualBranchesHaveNoDirectionPart) {
  Eigen::VectorXd t(3);
  t << 1.5, -0.3, 0.0;
  const auto [c, d] = split_torques(t, t);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(c[i], t[i]);
    EXPECT_EQ(d[i], 0.0);
  }
}

TEST(SplitTorques, Reconstruction) {
  Rng rng(91);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd plus(6), minus(6);
    for (int i = 0; i < 6; ++i) {
      plus[i] = rng.uniform(-5.0, 5.0);
      minus[i] = rng.uniform(-5.0, 5.0);
    }
    const auto [c, d] = split_torques(plus, minus);
    expect_close(c + d, plus, 1e-15, "c + d");
    expect_close(c - d, minus, 1e-15, "c - d");
  }
}

TEST(Xi, PiecewiseValues) {
  GccParams p = GccParams::defaults(1);
  p.alpha = 0.7;
  auto eval = [&](double dq) {
    JointVector v(1);
    v[0] = dq;
    return xi(v, p)[0];
  };
  EXPECT_EQ(eval(0.0), 0.0);
  EXPECT_EQ(eval(1e-4), 0.0);        // inside dead-band
  EXPECT_EQ(eval(2e-4), 0.0);        // boundary belongs to the dead-band
  EXPECT_EQ(eval(2e-3), 0.7);        // saturation boundary
  EXPECT_EQ(eval(0.5), 0.7);
  EXPECT_EQ(eval(-0.5), -0.7);
  // Midpoint of the linear ramp: (1.1e-3 - 2e-4)/(2e-3 - 2e-4) = 0.5.
  EXPECT_NEAR(eval(1.1e-3), 0.35, 1e-15);
  EXPECT_NEAR(eval(-1.1e-3), -0.35, 1e-15);
}

TEST(Xi, OddContinuousAndBounded) {
  GccParams p = GccParams::defaults(1);
  Rng rng(92);
  auto eval = [&](double dq) {
    JointVector v(1);
    v[0] = dq;
    return xi(v, p)[0];
  };
  for (int k = 0; k < 1000; ++k) {
    const double dq = rng.uniform(-5e-3, 5e-3);
    EXPECT_EQ(eval(-dq), -eval(dq));
    EXPECT_LE(std::abs(eval(dq)), p.alpha);
  }
  // No jump at either boundary.
  const double e = 1e-9;
  EXPECT_NEAR(eval(2e-4 + e), eval(2e-4), 1e-5);
  EXPECT_NEAR(eval(2e-3 - e), eval(2e-3), 1e-5);
}

TEST(Xi, PerJointThresholds) {
  GccParams p;
  p.alpha = 1.0;
  p.dq_db = JointVector::Zero(2);
  p.dq_db << 0.0, 1e-3;
  p.dq_s = JointVector::Zero(2);
  p.dq_s << 1e-3, 2e-3;
  JointVector dq(2);
  dq << 5e-4, 5e-4;
  const Eigen::VectorXd v = xi(dq, p);
  EXPECT_EQ(v[0], 0.5);  // halfway up joint 1's ramp
  EXPECT_EQ(v[1], 0.0);  // still inside joint 2's dead-band
}

TEST(GccParams, ValidateRejectsBadShapes) {
  GccParams p = GccParams::defaults(3);
  p.validate();
  p.alpha = 1.2;
  EXPECT_THROW(p.validate(), ConfigError);
  p.alpha = 0.7;
  p.dq_db[1] = 2e-3;  // dead-band reaches saturation
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Control, SaturatedFullAlphaPicksDirectionNet) {
  // alpha = 1 and |dq| >= dq_s: nt_c + xi.nt_d collapses to the matching
  // direction net, so control == predict_compensation at the same dq.
  CompensationModel model = random_model(93);
  GccController c{model, GccParams::defaults(6)};
  c.params.alpha = 1.0;
  c.validate();
  Rng rng(94);
  const RobotModel robot = desk_robot();
  for (int k = 0; k < 50; ++k) {
    const JointVector q = random_config(robot, rng);
    JointVector dq(6);
    for (int i = 0; i < 6; ++i) dq[i] = rng.sign() * rng.uniform(2e-3, 0.05);
    const JointVector u = control(c, q, dq);
    const JointVector ref = predict_compensation(model, q, dq);
    for (int i = 0; i < 6; ++i) {
      EXPECT_NEAR(u[i], ref[i], 1e-12 * (1.0 + std::abs(ref[i]))) << "joint " << i;
    }
  }
}

TEST(Control, DeadBandAveragesTheBranches) {
  CompensationModel model = random_model(95);
  GccController c{model, GccParams::defaults(6)};
  c.validate();
  Rng rng(96);
  const RobotModel robot = desk_robot();
  for (int k = 0; k < 50; ++k) {
    const JointVector q = random_config(robot, rng);
    const JointVector u = control(c, q, JointVector::Zero(6));
    const JointVector up = predict_compensation(model, q, JointVector::Constant(6, 1.0));
    const JointVector dn = predict_compensation(model, q, JointVector::Constant(6, -1.0));
    for (int i = 0; i < 6; ++i) {
      const double mean = 0.5 * (up[i] + dn[i]);
      EXPECT_NEAR(u[i], mean, 1e-12 * (1.0 + std::abs(mean))) << "joint " << i;
    }
  }
}

TEST(Control, OppositeSaturatedDirectionsAverageToCenter) {
  CompensationModel model = random_model(97);
  GccController c{model, GccParams::defaults(6)};
  c.validate();
  Rng rng(98);
  const RobotModel robot = desk_robot();
  for (int k = 0; k < 20; ++k) {
    const JointVector q = random_config(robot, rng);
    const JointVector dq = JointVector::Constant(6, 0.01);
    const JointVector a = control(c, q, dq);
    const JointVector b = control(c, q, JointVector(-dq));
    const JointVector mid = control(c, q, JointVector::Zero(6));
    for (int i = 0; i < 6; ++i) {
      EXPECT_NEAR(0.5 * (a[i] + b[i]), mid[i], 1e-12 * (1.0 + std::abs(mid[i])));
    }
  }
}

TEST(Control, AlphaZeroIgnoresDirection) {
  CompensationModel model = random_model(99);
  GccController c{model, GccParams::defaults(6)};
  c.params.alpha = 0.0;
  c.validate();
  Rng rng(100);
  const RobotModel robot = desk_robot();
  const JointVector q = random_config(robot, rng);
  const JointVector u1 = control(c, q, JointVector::Constant(6, 0.02));
  const JointVector u2 = control(c, q, JointVector::Constant(6, -0.02));
  expect_close(u1, u2, 1e-14, "alpha=0 direction independence");
}

TEST(Policies, OraclePolicyCancelsExactly) {
  const Plant p = desk_plant();
  const TorquePolicy oracle = make_oracle_policy(p);
  Rng rng(101);
  const JointVector q = random_config(p.robot, rng);
  const JointVector dq = random_dq(6, rng);
  const JointVector u = oracle(q, dq);
  const JointVector tau = true_compensation_torque(p, q, dq);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(u[i], tau[i]);
}

TEST(Policies, TeacherPolicySaturatedMatchesBranch) {
  const Plant p = desk_plant();
  Rng bias_rng(102);
  const TeacherModel t = make_biased_teacher(p, 0.1, bias_rng);
  GccParams params = GccParams::defaults(6);
  params.alpha = 1.0;
  const TorquePolicy policy = make_teacher_policy(t, params);
  Rng rng(103);
  const JointVector q = random_config(p.robot, rng);
  const JointVector dq = JointVector::Constant(6, 0.01);  // saturated positive
  const JointVector u = policy(q, dq);
  const JointVector branch = teacher_predict(t, q, dq);
  expect_close(u, branch, 1e-12, "saturated teacher policy");
}

TEST(Policies, TeacherPolicyDeadBandIsBranchMean) {
  const Plant p = desk_plant();
  Rng bias_rng(104);
  const TeacherModel t = make_biased_teacher(p, 0.05, bias_rng);
  const TorquePolicy policy = make_teacher_policy(t, GccParams::defaults(6));
  Rng rng(105);
  const JointVector q = random_config(p.robot, rng);
  const JointVector u = policy(q, JointVector::Zero(6));
  const JointVector ones = JointVector::Constant(6, 1e-2);
  const JointVector mean =
      0.5 * (teacher_predict(t, q, ones) + teacher_predict(t, q, JointVector(-ones)));
  expect_close(u, mean, 1e-12, "dead-band teacher policy");
}

TEST(ModelIo, RoundTripPredictsIdentically) {
  const CompensationModel m = random_model(106);
  const std::string path = testing::TempDir() + "model.gcl";
  save_model(path, m);
  const CompensationModel r = load_model(path);
  EXPECT_EQ(r.robot_name, m.robot_name);
  ASSERT_EQ(r.kinds.size(), m.kinds.size());
  Rng rng(107);
  const RobotModel robot = desk_robot();
  for (int k = 0; k < 30; ++k) {
    const JointVector q = random_config(robot, rng);
    const JointVector dq = random_dq(6, rng);
    const JointVector a = predict_compensation(m, q, dq);
    const JointVector b = predict_compensation(r, q, dq);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(a[i], b[i]);
  }
}

TEST(ModelIo, WrongHeaderAndTruncationThrow) {
  const std::string path = testing::TempDir() + "nm.gcl";
  {
    std::ofstream out(path);
    out << "gcl-teacher v1\nend\n";
  }
  EXPECT_THROW(load_model(path), VersionError);

  const CompensationModel m = random_model(108);
  const std::string full = testing::TempDir() + "full_model.gcl";
  save_model(full, m);
  std::ifstream in(full);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const std::string cut = testing::TempDir() + "cut_model.gcl";
  {
    std::ofstream out(cut);
    out << text.substr(0, text.size() / 3);
  }
  EXPECT_THROW(load_model(cut), CorruptFileError);
}

TEST(Model, PredictUsesMaskPerJoint) {
  // Mixed-direction dq must take w_plus rows where dq > 0 and w_minus rows
  // where dq <= 0.
  const CompensationModel m = random_model(109);
  Rng rng(110);
  const RobotModel robot = desk_robot();
  const JointVector q = random_config(robot, rng);
  JointVector dq(6);
  dq << 0.01, -0.01, 0.02, -0.02, 0.03, 0.0;
  const JointVector mixed = predict_compensation(m, q, dq);
  const JointVector all_plus = predict_compensation(m, q, JointVector::Constant(6, 0.01));
  const JointVector all_minus = predict_compensation(m, q, JointVector::Constant(6, -0.01));
  for (int i = 0; i < 6; ++i) {
    const double expected = dq[i] > 0.0 ? all_plus[i] : all_minus[i];
    EXPECT_EQ(mixed[i], expected) << "joint " << i;
  }
}
