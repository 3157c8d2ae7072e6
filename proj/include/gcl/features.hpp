#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/dataset.hpp"
#include "gcl/robot.hpp"

namespace gcl {

inline int encoded_dim(const std::vector<JointKind>& kinds) {
  int d = 0;
  for (JointKind k : kinds) d += (k == JointKind::Revolute) ? 2 : 1;
  return d;
}

// Joint-by-joint trigonometric encoding: revolute q_i -> (sin q_i, cos q_i),
// prismatic d_i -> d_i. The (sin, cos) pair keeps the input continuous across
// the angle wrap.
inline Eigen::VectorXd trig_encode(const JointVector& q, const std::vector<JointKind>& kinds) {
  require_dim(q, static_cast<Eigen::Index>(kinds.size()), "trig_encode: q");
  Eigen::VectorXd z(encoded_dim(kinds));
  Eigen::Index c = 0;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == JointKind::Revolute) {
      z[c++] = std::sin(q[static_cast<Eigen::Index>(i)]);
      z[c++] = std::cos(q[static_cast<Eigen::Index>(i)]);
    } else {
      z[c++] = q[static_cast<Eigen::Index>(i)];
    }
  }
  return z;
}

// Inverse of trig_encode up to the angle wrap: revolute angles come back as
// the atan2 principal value in (-pi, pi].
inline JointVector trig_decode(const Eigen::VectorXd& z, const std::vector<JointKind>& kinds) {
  require_dim(z, encoded_dim(kinds), "trig_decode: z");
  JointVector q(static_cast<Eigen::Index>(kinds.size()));
  Eigen::Index c = 0;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == JointKind::Revolute) {
      const double s = z[c++];
      const double co = z[c++];
      q[static_cast<Eigen::Index>(i)] = std::atan2(s, co);
    } else {
      q[static_cast<Eigen::Index>(i)] = z[c++];
    }
  }
  return q;
}

inline Eigen::VectorXd normalize(const Eigen::VectorXd& a, const Eigen::VectorXd& mu,
                                 const Eigen::VectorXd& sigma) {
  require_dim(mu, a.size(), "normalize: mu");
  require_dim(sigma, a.size(), "normalize: sigma");
  if ((sigma.array() <= 0.0).any()) throw NumericError("normalize: sigma must be > 0");
  return (a - mu).cwiseQuotient(sigma);
}

inline Eigen::VectorXd denormalize(const Eigen::VectorXd& na, const Eigen::VectorXd& mu,
                                   const Eigen::VectorXd& sigma) {
  require_dim(mu, na.size(), "denormalize: mu");
  require_dim(sigma, na.size(), "denormalize: sigma");
  return na.cwiseProduct(sigma) + mu;
}

struct NormParams {
  Eigen::VectorXd mu_in, sigma_in;   // over x1, length n+k
  Eigen::VectorXd mu_out, sigma_out; // over y, length n
  std::vector<int> degenerate_in;    // indices where the fitted std was 0
  std::vector<int> degenerate_out;

  void validate() const {
    if (mu_in.size() != sigma_in.size() || mu_out.size() != sigma_out.size()) {
      throw DimensionError("NormParams: mu/sigma length mismatch");
    }
    if ((sigma_in.array() <= 0.0).any() || (sigma_out.array() <= 0.0).any()) {
      throw NumericError("NormParams: sigma entries must be > 0");
    }
    if (!mu_in.allFinite() || !sigma_in.allFinite() || !mu_out.allFinite() ||
        !sigma_out.allFinite()) {
      throw NumericError("NormParams: non-finite entry");
    }
  }
};

namespace detail {

// Per-row mean and population (1/N) standard deviation of a column-per-sample
// matrix. Rows whose std is exactly 0 get sigma 1 so the affine map stays
// invertible; their indices are reported back.
inline void fit_rows(const Eigen::MatrixXd& m, Eigen::VectorXd& mu, Eigen::VectorXd& sigma,
                     std::vector<int>& degenerate) {
  const double inv_n = 1.0 / static_cast<double>(m.cols());
  mu = m.rowwise().sum() * inv_n;
  sigma.resize(m.rows());
  degenerate.clear();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double d = m(r, c) - mu[r];
      acc += d * d;
    }
    sigma[r] = std::sqrt(acc * inv_n);
    if (sigma[r] == 0.0) {
      sigma[r] = 1.0;
      degenerate.push_back(static_cast<int>(r));
    }
  }
}

}  // namespace detail

inline NormParams fit_norm_params(const Dataset& d) {
  if (d.size() < 2) {
    throw NumericError("fit_norm_params: need at least 2 samples, got " +
                       std::to_string(d.size()));
  }
  const DatasetMatrices m = to_matrices(d);
  NormParams p;
  detail::fit_rows(m.x1, p.mu_in, p.sigma_in, p.degenerate_in);
  detail::fit_rows(m.y, p.mu_out, p.sigma_out, p.degenerate_out);
  p.validate();
  return p;
}

// x1 and y are normalized; x2 passes through untouched because the model only
// ever reads its sign.
inline Dataset normalize_dataset(const Dataset& d, const NormParams& p) {
  require_dim(p.mu_in, d.in_dim, "normalize_dataset: mu_in");
  require_dim(p.mu_out, d.joints, "normalize_dataset: mu_out");
  Dataset out;
  out.in_dim = d.in_dim;
  out.joints = d.joints;
  out.provenance = d.provenance;
  out.samples.reserve(d.samples.size());
  for (const Sample& s : d.samples) {
    Sample ns;
    ns.x1 = normalize(s.x1, p.mu_in, p.sigma_in);
    ns.x2 = s.x2;
    ns.y = normalize(s.y, p.mu_out, p.sigma_out);
    out.samples.push_back(std::move(ns));
  }
  return out;
}

}  // namespace gcl
