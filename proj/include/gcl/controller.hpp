#pragma once

#include <cmath>
#include <utility>

#include "gcl/common.hpp"
#include "gcl/features.hpp"
#include "gcl/model.hpp"
#include "gcl/plant.hpp"
#include "gcl/teacher.hpp"

namespace gcl {

// Dead-band / saturation shaping of the direction component. alpha is the
// fraction of the directional torque applied once |dq| saturates.
struct GccParams {
  double alpha = 0.7;
  JointVector dq_db;  // rad, dead-band half-width
  JointVector dq_s;   // rad, saturation threshold

  static GccParams defaults(int n) {
    GccParams p;
    p.dq_db = JointVector::Constant(n, 2e-4);
    p.dq_s = JointVector::Constant(n, 2e-3);
    return p;
  }

  void validate() const {
    if (!(0.0 <= alpha && alpha <= 1.0)) throw ConfigError("GccParams: alpha must be in [0, 1]");
    require_dim(dq_s, dq_db.size(), "GccParams: dq_s");
    for (Eigen::Index i = 0; i < dq_db.size(); ++i) {
      if (!(0.0 <= dq_db[i] && dq_db[i] < dq_s[i])) {
        throw ConfigError("GccParams: need 0 <= dq_db < dq_s per joint");
      }
    }
  }
};

// nt_c carries what both directions share, nt_d what flips with direction;
// nt_plus = nt_c + nt_d and nt_minus = nt_c - nt_d by construction.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> split_torques(const Eigen::VectorXd& nt_plus,
                                                                 const Eigen::VectorXd& nt_minus) {
  require_dim(nt_minus, nt_plus.size(), "split_torques: nt_minus");
  return {0.5 * (nt_plus + nt_minus), 0.5 * (nt_plus - nt_minus)};
}

// Piecewise-linear compensation ratio: zero inside the dead-band, sgn * alpha
// beyond saturation, linear in between. Odd and continuous in dq.
inline Eigen::VectorXd xi(const JointVector& dq, const GccParams& p) {
  p.validate();
  require_dim(dq, p.dq_db.size(), "xi: dq");
  Eigen::VectorXd out(dq.size());
  for (Eigen::Index i = 0; i < dq.size(); ++i) {
    const double mag = std::abs(dq[i]);
    const double sgn = dq[i] > 0.0 ? 1.0 : (dq[i] < 0.0 ? -1.0 : 0.0);
    if (mag <= p.dq_db[i]) {
      out[i] = 0.0;
    } else if (mag >= p.dq_s[i]) {
      out[i] = sgn * p.alpha;
    } else {
      out[i] = sgn * p.alpha * (mag - p.dq_db[i]) / (p.dq_s[i] - p.dq_db[i]);
    }
  }
  return out;
}

struct GccController {
  CompensationModel model;
  GccParams params;

  void validate() const {
    model.validate();
    params.validate();
    require_dim(params.dq_db, model.joints(), "GccController: dq_db");
  }
};

// u = denormalize(nt_c + xi(dq) . nt_d) with nt_plus/minus the direction
// nets evaluated on the normalized encoding of q.
inline JointVector control(const GccController& c, const JointVector& q, const JointVector& dq) {
  require_dim(q, c.model.joints(), "control: q");
  require_dim(dq, c.model.joints(), "control: dq");
  const Eigen::VectorXd nz =
      normalize(trig_encode(q, c.model.kinds), c.model.norm.mu_in, c.model.norm.sigma_in);
  const Eigen::VectorXd nt_plus = forward(c.model.w_plus, nz);
  const Eigen::VectorXd nt_minus = forward(c.model.w_minus, nz);
  const auto [nt_c, nt_d] = split_torques(nt_plus, nt_minus);
  const Eigen::VectorXd blended = nt_c + xi(dq, c.params).cwiseProduct(nt_d);
  return denormalize(blended, c.model.norm.mu_out, c.model.norm.sigma_out);
}

inline TorquePolicy make_gcc_policy(GccController c) {
  c.validate();
  return [c = std::move(c)](const JointVector& q, const JointVector& dq) {
    return control(c, q, dq);
  };
}

// Physics-baseline policy: the same xi law applied to the teacher's two
// direction branches, no networks involved.
inline TorquePolicy make_teacher_policy(TeacherModel t, GccParams params) {
  params.validate();
  return [t = std::move(t), params = std::move(params)](const JointVector& q,
                                                        const JointVector& dq) {
    const JointVector ones = JointVector::Constant(q.size(), 1e-2);
    const JointVector tau_plus = teacher_predict(t, q, ones);
    const JointVector tau_minus = teacher_predict(t, q, -ones);
    const auto [tau_c, tau_d] = split_torques(tau_plus, tau_minus);
    return JointVector(tau_c + xi(dq, params).cwiseProduct(tau_d));
  };
}

// Exact-cancellation reference: commands the plant's own compensation torque.
inline TorquePolicy make_oracle_policy(const Plant& p) {
  return [p](const JointVector& q, const JointVector& dq) {
    return true_compensation_torque(p, q, dq);
  };
}

}  // namespace gcl
