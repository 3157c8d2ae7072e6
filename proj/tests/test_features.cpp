#include "gcl/features.hpp"

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "gcl/learning.hpp"
#include "gcl/presets.hpp"
#include "test_util.hpp"

using namespace gcl;
using testutil::expect_bits;
using testutil::expect_close;

namespace {

const std::vector<JointKind> kSixRev(6, JointKind::Revolute);

Dataset tiny_dataset() {
  // Two 1-dof records with x1 = {0}, {2}: mean 1, population std 1.
  Dataset d;
  d.in_dim = 1;
  d.joints = 1;
  Sample a, b;
  a.x1 = Eigen::VectorXd::Constant(1, 0.0);
  a.x2 = JointVector::Constant(1, 0.01);
  a.y = JointVector::Constant(1, 5.0);
  b.x1 = Eigen::VectorXd::Constant(1, 2.0);
  b.x2 = JointVector::Constant(1, -0.01);
  b.y = JointVector::Constant(1, 5.0);
  d.append(a);
  d.append(b);
  return d;
}

}  // namespace

TEST(TrigEncode, KnownAngles) {
  const std::vector<JointKind> one{JointKind::Revolute};
  JointVector q(1);
  q[0] = 0.0;
  Eigen::VectorXd z = trig_encode(q, one);
  ASSERT_EQ(z.size(), 2);
  EXPECT_EQ(z[0], 0.0);
  EXPECT_EQ(z[1], 1.0);

  q[0] = kPi / 2.0;
  z = trig_encode(q, one);
  EXPECT_NEAR(z[0], 1.0, 1e-15);
  EXPECT_NEAR(z[1], 0.0, 1e-15);
}

TEST(TrigEncode, MixedChainLayout) {
  const std::vector<JointKind> kinds{JointKind::Revolute, JointKind::Prismatic,
                                     JointKind::Revolute};
  EXPECT_EQ(encoded_dim(kinds), 5);
  JointVector q(3);
  q << 0.4, 0.3, -1.1;
  const Eigen::VectorXd z = trig_encode(q, kinds);
  ASSERT_EQ(z.size(), 5);
  EXPECT_EQ(z[0], std::sin(0.4));
  EXPECT_EQ(z[1], std::cos(0.4));
  EXPECT_EQ(z[2], 0.3);
  EXPECT_EQ(z[3], std::sin(-1.1));
  EXPECT_EQ(z[4], std::cos(-1.1));
}

TEST(TrigEncode, DecodeRoundTrip) {
  Rng rng(61);
  for (int k = 0; k < 200; ++k) {
    JointVector q(6);
    for (int i = 0; i < 6; ++i) q[i] = rng.uniform(-kPi + 1e-6, kPi);
    const JointVector back = trig_decode(trig_encode(q, kSixRev), kSixRev);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(back[i], q[i], 1e-12);
  }
}

TEST(TrigEncode, ContinuousAcrossWrap) {
  const std::vector<JointKind> one{JointKind::Revolute};
  JointVector a(1), b(1);
  a[0] = kPi - 1e-9;
  b[0] = -kPi + 1e-9;
  const Eigen::VectorXd za = trig_encode(a, one), zb = trig_encode(b, one);
  EXPECT_LT((za - zb).norm(), 1e-8);
}

TEST(TrigEncode, ChordBoundedByAngleDistance) {
  // |(sin,cos)(a) - (sin,cos)(b)| = 2|sin((a-b)/2)| <= |a-b|.
  const std::vector<JointKind> one{JointKind::Revolute};
  Rng rng(62);
  for (int k = 0; k < 500; ++k) {
    JointVector a(1), b(1);
    a[0] = rng.uniform(-10.0, 10.0);
    b[0] = rng.uniform(-10.0, 10.0);
    const double chord = (trig_encode(a, one) - trig_encode(b, one)).norm();
    EXPECT_LE(chord, std::abs(a[0] - b[0]) + 1e-12);
    EXPECT_LE(chord, 2.0 + 1e-12);
  }
}

TEST(TrigEncode, DimensionMismatchThrows) {
  JointVector q(2);
  q.setZero();
  EXPECT_THROW(trig_encode(q, kSixRev), DimensionError);
  EXPECT_THROW(trig_decode(Eigen::VectorXd::Zero(5), kSixRev), DimensionError);
}

TEST(Normalize, HandExample) {
  Eigen::VectorXd a(1), mu(1), sigma(1);
  a << 3.0;
  mu << 1.0;
  sigma << 2.0;
  const Eigen::VectorXd na = normalize(a, mu, sigma);
  EXPECT_EQ(na[0], 1.0);
  const Eigen::VectorXd back = denormalize(na, mu, sigma);
  EXPECT_EQ(back[0], 3.0);
}

TEST(Normalize, IdentityParams) {
  Rng rng(63);
  Eigen::VectorXd a(8);
  for (int i = 0; i < 8; ++i) a[i] = rng.uniform(-5.0, 5.0);
  const Eigen::VectorXd na = normalize(a, Eigen::VectorXd::Zero(8), Eigen::VectorXd::Ones(8));
  expect_bits(na, a, "identity normalize");
}

TEST(Normalize, RoundTripPrecision) {
  Rng rng(64);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd a(12), mu(12), sigma(12);
    for (int i = 0; i < 12; ++i) {
      a[i] = rng.uniform(-100.0, 100.0);
      mu[i] = rng.uniform(-10.0, 10.0);
      sigma[i] = rng.uniform(0.01, 50.0);
    }
    const Eigen::VectorXd there = normalize(a, mu, sigma);
    const Eigen::VectorXd back = denormalize(there, mu, sigma);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(back[i], a[i], 1e-12 * std::abs(a[i]) + 1e-12);
  }
}

TEST(Normalize, NonPositiveSigmaThrows) {
  Eigen::VectorXd a = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd sigma(2);
  sigma << 1.0, 0.0;
  EXPECT_THROW(normalize(a, mu, sigma), NumericError);
  sigma << 1.0, -1.0;
  EXPECT_THROW(normalize(a, mu, sigma), NumericError);
  // Denormalize stays defined for any sigma; no throw expected.
  sigma << 1.0, 0.5;
  EXPECT_NO_THROW(denormalize(a, mu, sigma));
}

TEST(FitNormParams, TinyDatasetByHand) {
  const Dataset d = tiny_dataset();
  const NormParams p = fit_norm_params(d);
  ASSERT_EQ(p.mu_in.size(), 1);
  EXPECT_EQ(p.mu_in[0], 1.0);
  EXPECT_EQ(p.sigma_in[0], 1.0);  // population std of {0, 2}
  EXPECT_TRUE(p.degenerate_in.empty());

  // y is constant 5: degenerate output row gets sigma 1.
  EXPECT_EQ(p.mu_out[0], 5.0);
  EXPECT_EQ(p.sigma_out[0], 1.0);
  ASSERT_EQ(p.degenerate_out.size(), 1u);
  EXPECT_EQ(p.degenerate_out[0], 0);
}

TEST(FitNormParams, PopulationNotSampleStd) {
  // {0, 2, 4}: population std sqrt(8/3), sample std would be 2.
  Dataset d;
  d.in_dim = 1;
  d.joints = 1;
  for (double v : {0.0, 2.0, 4.0}) {
    Sample s;
    s.x1 = Eigen::VectorXd::Constant(1, v);
    s.x2 = JointVector::Constant(1, 0.01);
    s.y = JointVector::Constant(1, v);
    d.append(s);
  }
  const NormParams p = fit_norm_params(d);
  EXPECT_NEAR(p.sigma_in[0], std::sqrt(8.0 / 3.0), 1e-15);
  EXPECT_NEAR(p.sigma_out[0], std::sqrt(8.0 / 3.0), 1e-15);
}

TEST(FitNormParams, NeedsTwoSamples) {
  Dataset d;
  d.in_dim = 1;
  d.joints = 1;
  EXPECT_THROW(fit_norm_params(d), NumericError);
  Sample s;
  s.x1 = Eigen::VectorXd::Constant(1, 1.0);
  s.x2 = JointVector::Constant(1, 0.01);
  s.y = JointVector::Constant(1, 1.0);
  d.append(s);
  EXPECT_THROW(fit_norm_params(d), NumericError);
}

TEST(FitNormParams, FitThenNormalizeIsStandard) {
  const Plant plant = desk_plant();
  Rng rng(65);
  const auto states = random_sample_states(plant.robot.limits_lo(), plant.robot.limits_hi(), 500, rng);
  const Dataset d = collect_dataset(plant, states, rng);
  const NormParams p = fit_norm_params(d);
  const Dataset nd = normalize_dataset(d, p);
  const DatasetMatrices m = to_matrices(nd);

  for (Eigen::Index r = 0; r < m.x1.rows(); ++r) {
    const double mean = m.x1.row(r).mean();
    const double var = m.x1.row(r).squaredNorm() / double(m.x1.cols()) - mean * mean;
    EXPECT_NEAR(mean, 0.0, 1e-9) << "x1 row " << r;
    EXPECT_NEAR(std::sqrt(var), 1.0, 1e-9) << "x1 row " << r;
  }
  for (Eigen::Index r = 0; r < m.y.rows(); ++r) {
    const double mean = m.y.row(r).mean();
    const double var = m.y.row(r).squaredNorm() / double(m.y.cols()) - mean * mean;
    EXPECT_NEAR(mean, 0.0, 1e-9) << "y row " << r;
    EXPECT_NEAR(std::sqrt(var), 1.0, 1e-9) << "y row " << r;
  }
}

TEST(NormalizeDataset, LeavesX2Untouched) {
  const Plant plant = desk_plant();
  Rng rng(66);
  const auto states = random_sample_states(plant.robot.limits_lo(), plant.robot.limits_hi(), 50, rng);
  const Dataset d = collect_dataset(plant, states, rng);
  const NormParams p = fit_norm_params(d);
  const Dataset nd = normalize_dataset(d, p);
  ASSERT_EQ(nd.size(), d.size());
  for (std::size_t s = 0; s < d.size(); ++s) {
    expect_bits(nd.samples[s].x2, d.samples[s].x2, "x2");
  }
}

TEST(NormalizeDataset, RoundTripThroughDenormalize) {
  const Plant plant = desk_plant();
  Rng rng(67);
  const auto states = random_sample_states(plant.robot.limits_lo(), plant.robot.limits_hi(), 50, rng);
  const Dataset d = collect_dataset(plant, states, rng);
  const NormParams p = fit_norm_params(d);
  const Dataset nd = normalize_dataset(d, p);
  for (std::size_t s = 0; s < d.size(); ++s) {
    const Eigen::VectorXd x1 = denormalize(nd.samples[s].x1, p.mu_in, p.sigma_in);
    const Eigen::VectorXd y = denormalize(nd.samples[s].y, p.mu_out, p.sigma_out);
    expect_close(x1, d.samples[s].x1, 1e-12, "x1 round trip");
    expect_close(y, d.samples[s].y, 1e-12, "y round trip");
  }
}

TEST(NormParams, ValidateCatchesBadSigma) {
  NormParams p;
  p.mu_in = Eigen::VectorXd::Zero(2);
  p.sigma_in = Eigen::VectorXd::Ones(2);
  p.mu_out = Eigen::VectorXd::Zero(1);
  p.sigma_out = Eigen::VectorXd::Ones(1);
  p.validate();
  p.sigma_in[1] = 0.0;
  EXPECT_THROW(p.validate(), NumericError);
}

TEST(DatasetIo, SaveLoadRoundTrip) {
  const Plant plant = desk_plant();
  Rng rng(68);
  const auto states = random_sample_states(plant.robot.limits_lo(), plant.robot.limits_hi(), 40, rng);
  const Dataset d = collect_dataset(plant, states, rng);
  const std::string path = testing::TempDir() + "data.csv";
  save_dataset(path, d);
  const Dataset r = load_dataset(path);
  EXPECT_EQ(r.in_dim, d.in_dim);
  EXPECT_EQ(r.joints, d.joints);
  ASSERT_EQ(r.size(), d.size());
  for (std::size_t s = 0; s < d.size(); ++s) {
    expect_bits(r.samples[s].x1, d.samples[s].x1, "x1");
    expect_bits(r.samples[s].x2, d.samples[s].x2, "x2");
    expect_bits(r.samples[s].y, d.samples[s].y, "y");
  }
}

TEST(DatasetIo, HeaderIsZeroBasedAndStrict) {
  const std::string path = testing::TempDir() + "hdr.csv";
  {
    std::ofstream out(path);
    out << "x1_0,x1_1,x2_0,y_0\n";
    out << "0.1,0.2,0.01,1.5\n";
  }
  const Dataset d = load_dataset(path);
  EXPECT_EQ(d.in_dim, 2);
  EXPECT_EQ(d.joints, 1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.samples[0].y[0], 1.5);

  const std::string bad = testing::TempDir() + "hdr_bad.csv";
  {
    std::ofstream out(bad);
    out << "x1_1,x1_2,x2_1,y_1\n";  // one-based: rejected
    out << "0.1,0.2,0.01,1.5\n";
  }
  EXPECT_THROW(load_dataset(bad), CorruptFileError);
}

TEST(DatasetIo, RaggedRowThrows) {
  const std::string path = testing::TempDir() + "ragged.csv";
  {
    std::ofstream out(path);
    out << "x1_0,x2_0,y_0\n";
    out << "0.1,0.01\n";
  }
  EXPECT_THROW(load_dataset(path), CorruptFileError);
}

TEST(Dataset, MergeChecksDimsAndMarksJoint) {
  Dataset a = tiny_dataset(), b = tiny_dataset();
  const Dataset m = merge(a, b);
  EXPECT_EQ(m.size(), 4u);
  EXPECT_EQ(m.provenance, Provenance::joint);
  Dataset c;
  c.in_dim = 2;
  c.joints = 1;
  EXPECT_THROW(merge(a, c), DimensionError);
}

TEST(Dataset, AppendChecksDims) {
  Dataset d;
  d.in_dim = 2;
  d.joints = 1;
  Sample s;
  s.x1 = Eigen::VectorXd::Zero(3);
  s.x2 = JointVector::Zero(1);
  s.y = JointVector::Zero(1);
  EXPECT_THROW(d.append(s), DimensionError);
}
