#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/dataset.hpp"
#include "gcl/features.hpp"
#include "gcl/model.hpp"
#include "gcl/net.hpp"
#include "gcl/plant.hpp"
#include "gcl/rng.hpp"
#include "gcl/teacher.hpp"

namespace gcl {

struct SampledState {
  JointVector q;
  JointVector dq;
};

// Evenly spaced per-joint positions including both limits, crossed with both
// motion directions applied on all joints at once. Size is 2 * points^n, so
// the cap guards against accidental explosion.
inline std::vector<SampledState> systematic_sample_grid(const JointVector& limits_lo,
                                                        const JointVector& limits_hi,
                                                        int points_per_joint, double dq_mag,
                                                        long cap = 2000000) {
  const Eigen::Index n = limits_lo.size();
  require_dim(limits_hi, n, "systematic_sample_grid: limits_hi");
  if (points_per_joint < 2) throw ConfigError("systematic_sample_grid: need >= 2 points per joint");
  if (dq_mag <= 0.0) throw ConfigError("systematic_sample_grid: dq_mag must be > 0");
  double size_est = 2.0;
  for (Eigen::Index i = 0; i < n; ++i) size_est *= points_per_joint;
  if (size_est > static_cast<double>(cap)) {
    throw ConfigError("systematic_sample_grid: grid size " + std::to_string(size_est) +
                      " exceeds cap " + std::to_string(cap));
  }

  std::vector<SampledState> states;
  states.reserve(static_cast<std::size_t>(size_est));
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const JointVector dq_plus = JointVector::Constant(n, dq_mag);
  while (true) {
    JointVector q(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = idx[static_cast<std::size_t>(i)];
      q[i] = (k == points_per_joint - 1)
                 ? limits_hi[i]
                 : limits_lo[i] + (limits_hi[i] - limits_lo[i]) * k / (points_per_joint - 1);
    }
    states.push_back({q, dq_plus});
    states.push_back({q, -dq_plus});
    // odometer increment, last joint fastest
    Eigen::Index j = n - 1;
    while (j >= 0) {
      if (++idx[static_cast<std::size_t>(j)] < points_per_joint) break;
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return states;
}

// Uniform positions with per-joint direction uniform in {+,-} and magnitude
// in [1e-3, 0.05] rad, the same law the teacher sampler uses.
inline std::vector<SampledState> random_sample_states(const JointVector& limits_lo,
                                                      const JointVector& limits_hi, int count,
                                                      Rng& rng) {
  const Eigen::Index n = limits_lo.size();
  require_dim(limits_hi, n, "random_sample_states: limits_hi");
  if (count < 1) throw ConfigError("random_sample_states: count must be >= 1");
  std::vector<SampledState> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    SampledState st;
    st.q.resize(n);
    st.dq.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      st.q[i] = rng.uniform(limits_lo[i], limits_hi[i]);
      st.dq[i] = rng.sign() * rng.uniform(1e-3, 0.05);
    }
    states.push_back(std::move(st));
  }
  return states;
}

// Measure the plant at each state. x1 encodes the noisy position, matching
// what a controller would see at run time.
inline Dataset collect_dataset(const Plant& p, const std::vector<SampledState>& states, Rng& rng) {
  const std::vector<JointKind> kinds = p.robot.kinds();
  Dataset d;
  d.in_dim = encoded_dim(kinds);
  d.joints = p.n();
  d.provenance = Provenance::system;
  d.samples.reserve(states.size());
  for (const SampledState& st : states) {
    const MeasuredSample m = measure_sample(p, st.q, st.dq, rng);
    Sample rec;
    rec.x1 = trig_encode(m.q, kinds);
    rec.x2 = m.dq;
    rec.y = m.tau;
    d.samples.push_back(std::move(rec));
  }
  return d;
}

// Mean squared error over samples and joints of the direction-masked dual-net
// prediction against normalized targets.
inline double masked_loss(const MlpParams& w_plus, const MlpParams& w_minus,
                          const DatasetMatrices& batch) {
  if (batch.x1.cols() == 0) throw NumericError("masked_loss: empty batch");
  const Eigen::MatrixXd mask = (batch.x2.array() > 0.0).cast<double>().matrix();
  const Eigen::MatrixXd pred = forward_batch(w_plus, batch.x1).cwiseProduct(mask) +
                               forward_batch(w_minus, batch.x1)
                                   .cwiseProduct((1.0 - mask.array()).matrix());
  return (pred - batch.y).squaredNorm() /
         static_cast<double>(batch.y.rows() * batch.y.cols());
}

inline double masked_loss(const CompensationModel& m, const Dataset& normalized_batch) {
  return masked_loss(m.w_plus, m.w_minus, to_matrices(normalized_batch));
}

// Loss plus exact parameter gradients of the mean, written into g_plus/g_minus.
inline double masked_loss_grad(const MlpParams& w_plus, const MlpParams& w_minus,
                               const DatasetMatrices& batch, MlpGrads& g_plus,
                               MlpGrads& g_minus) {
  if (batch.x1.cols() == 0) throw NumericError("masked_loss_grad: empty batch");
  const Eigen::MatrixXd mask = (batch.x2.array() > 0.0).cast<double>().matrix();
  ForwardCache cache_plus, cache_minus;
  const Eigen::MatrixXd out_plus = forward_batch(w_plus, batch.x1, &cache_plus);
  const Eigen::MatrixXd out_minus = forward_batch(w_minus, batch.x1, &cache_minus);
  const Eigen::MatrixXd resid = out_plus.cwiseProduct(mask) +
                                out_minus.cwiseProduct((1.0 - mask.array()).matrix()) - batch.y;
  const double scale = 2.0 / static_cast<double>(batch.y.rows() * batch.y.cols());
  g_plus = backward_batch(w_plus, cache_plus, (scale * resid.array() * mask.array()).matrix());
  g_minus = backward_batch(w_minus, cache_minus,
                           (scale * resid.array() * (1.0 - mask.array())).matrix());
  return resid.squaredNorm() / static_cast<double>(batch.y.rows() * batch.y.cols());
}

// Blended objective: (1 - lambda) * system loss + lambda * teacher loss + reg.
inline double pkd_objective(double lambda, double loss_system, double loss_teacher, double reg) {
  return (1.0 - lambda) * loss_system + lambda * loss_teacher + reg;
}

inline double lambda_schedule(long step, long total, double lambda_hi, double lambda_lo) {
  if (total < 1) throw ConfigError("lambda_schedule: total must be >= 1");
  if (step < 0 || step > total) throw ConfigError("lambda_schedule: step out of [0, total]");
  if (!(0.0 <= lambda_lo && lambda_lo <= lambda_hi && lambda_hi <= 1.0)) {
    throw ConfigError("lambda_schedule: need 0 <= lambda_lo <= lambda_hi <= 1");
  }
  if (step == 0) return lambda_hi;
  if (step == total) return lambda_lo;
  return lambda_hi + (lambda_lo - lambda_hi) * static_cast<double>(step) /
                         static_cast<double>(total);
}

struct EarlyStopDecision {
  bool stop = false;
  int best_index = -1;  // first occurrence of the minimum
};

// Stop once `patience` consecutive checks failed to improve on the best.
inline EarlyStopDecision early_stop_check(const std::vector<double>& val_history, int patience) {
  if (patience < 1) throw ConfigError("early_stop_check: patience must be >= 1");
  EarlyStopDecision d;
  if (val_history.empty()) return d;
  std::size_t best = 0;
  for (std::size_t i = 1; i < val_history.size(); ++i) {
    if (val_history[i] < val_history[best]) best = i;
  }
  d.best_index = static_cast<int>(best);
  d.stop = (val_history.size() - 1 - best) >= static_cast<std::size_t>(patience);
  return d;
}

struct TrainHyper {
  long max_steps = 20000;
  int batch_size = 128;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double l2_coeff = 1e-4;
  int patience = 10;
  long check_interval = 200;
  double lambda_hi = 1.0;
  double lambda_lo = 0.0;
  int t_p = 30000;
  std::vector<int> hidden_dims = {30, 30, 30};
  std::uint64_t seed = 0;

  void validate() const {
    if (max_steps < 1 || batch_size < 1 || check_interval < 1 || patience < 1 || t_p < 1) {
      throw ConfigError("TrainHyper: counts must be >= 1");
    }
    if (lr <= 0.0 || l2_coeff < 0.0 || eps <= 0.0) {
      throw ConfigError("TrainHyper: lr and eps must be > 0, l2_coeff >= 0");
    }
    if (!(0.0 < beta1 && beta1 < 1.0 && 0.0 < beta2 && beta2 < 1.0)) {
      throw ConfigError("TrainHyper: betas must lie in (0, 1)");
    }
    if (!(0.0 <= lambda_lo && lambda_lo <= lambda_hi && lambda_hi <= 1.0)) {
      throw ConfigError("TrainHyper: need 0 <= lambda_lo <= lambda_hi <= 1");
    }
    if (hidden_dims.empty()) throw ConfigError("TrainHyper: hidden_dims must be nonempty");
    for (int h : hidden_dims) {
      if (h < 1) throw ConfigError("TrainHyper: hidden dims must be >= 1");
    }
  }
};

struct TrainLogRow {
  long step = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lambda = 0.0;
};

struct TrainResult {
  CompensationModel model;
  std::vector<TrainLogRow> log;
  double best_val_loss = 0.0;
  long stopped_at_step = 0;
};

namespace detail {

inline DatasetMatrices gather_batch(const DatasetMatrices& all, int batch_size, Rng& rng) {
  const std::uint64_t count = static_cast<std::uint64_t>(all.x1.cols());
  DatasetMatrices b;
  b.x1.resize(all.x1.rows(), batch_size);
  b.x2.resize(all.x2.rows(), batch_size);
  b.y.resize(all.y.rows(), batch_size);
  for (int c = 0; c < batch_size; ++c) {
    const Eigen::Index idx = static_cast<Eigen::Index>(rng.below(count));
    b.x1.col(c) = all.x1.col(idx);
    b.x2.col(c) = all.x2.col(idx);
    b.y.col(c) = all.y.col(idx);
  }
  return b;
}

}  // namespace detail

// Shared minibatch-Adam loop behind train_lfs and train_pkd. Normalization
// parameters are passed in because the two paths fit them on different data.
// d_system may be empty only for a pure-distillation run (lambda fixed at 1),
// d_teacher only for a system-only run (lambda fixed at 0). Each loss term is
// skipped entirely when its weight is zero, so the RNG streams of unused
// terms are never consumed.
inline TrainResult train_blend(const Dataset& d_system, const Dataset& d_val,
                               const Dataset& d_teacher, const NormParams& norm,
                               const std::string& robot_name,
                               const std::vector<JointKind>& kinds, const TrainHyper& h) {
  h.validate();
  norm.validate();
  if (d_val.empty()) throw ConfigError("train_blend: validation set is empty");
  if (d_system.empty() && !(h.lambda_hi == 1.0 && h.lambda_lo == 1.0)) {
    throw ConfigError("train_blend: empty system set requires lambda fixed at 1");
  }
  if (d_teacher.empty() && h.lambda_hi > 0.0) {
    throw ConfigError("train_blend: teacher set required when lambda can be nonzero");
  }

  const int in_dim = static_cast<int>(norm.mu_in.size());
  const int out_dim = static_cast<int>(norm.mu_out.size());
  std::vector<int> dims;
  dims.push_back(in_dim);
  dims.insert(dims.end(), h.hidden_dims.begin(), h.hidden_dims.end());
  dims.push_back(out_dim);

  Rng rng_init(derive_seed(h.seed, {0}));
  Rng rng_system(derive_seed(h.seed, {1}));
  Rng rng_teacher(derive_seed(h.seed, {2}));

  CompensationModel m;
  m.robot_name = robot_name;
  m.kinds = kinds;
  m.norm = norm;
  m.w_plus = init_mlp(dims, rng_init);
  m.w_minus = init_mlp(dims, rng_init);

  const DatasetMatrices sys_all =
      d_system.empty() ? DatasetMatrices{} : to_matrices(normalize_dataset(d_system, norm));
  const DatasetMatrices teach_all =
      d_teacher.empty() ? DatasetMatrices{} : to_matrices(normalize_dataset(d_teacher, norm));
  const DatasetMatrices val_all = to_matrices(normalize_dataset(d_val, norm));

  AdamState adam_plus = AdamState::for_params(m.w_plus, h.lr, h.beta1, h.beta2, h.eps);
  AdamState adam_minus = AdamState::for_params(m.w_minus, h.lr, h.beta1, h.beta2, h.eps);

  TrainResult result;
  std::vector<double> val_history;
  double best_val = std::numeric_limits<double>::infinity();
  MlpParams best_plus = m.w_plus;
  MlpParams best_minus = m.w_minus;
  bool have_snapshot = false;

  MlpGrads gp, gm, term_gp, term_gm;
  long step = 0;
  for (step = 1; step <= h.max_steps; ++step) {
    const double lambda = lambda_schedule(step, h.max_steps, h.lambda_hi, h.lambda_lo);
    double loss_system = 0.0;
    double loss_teacher = 0.0;
    gp = MlpGrads::zero_like(m.w_plus);
    gm = MlpGrads::zero_like(m.w_minus);

    if (lambda < 1.0) {
      const DatasetMatrices batch = detail::gather_batch(sys_all, h.batch_size, rng_system);
      loss_system = masked_loss_grad(m.w_plus, m.w_minus, batch, term_gp, term_gm);
      gp.add_scaled(term_gp, 1.0 - lambda);
      gm.add_scaled(term_gm, 1.0 - lambda);
    }
    if (lambda > 0.0) {
      const DatasetMatrices batch = detail::gather_batch(teach_all, h.batch_size, rng_teacher);
      loss_teacher = masked_loss_grad(m.w_plus, m.w_minus, batch, term_gp, term_gm);
      gp.add_scaled(term_gp, lambda);
      gm.add_scaled(term_gm, lambda);
    }

    const auto [reg_plus, reg_gp] = l2_penalty(m.w_plus, h.l2_coeff);
    const auto [reg_minus, reg_gm] = l2_penalty(m.w_minus, h.l2_coeff);
    gp.add_scaled(reg_gp, 1.0);
    gm.add_scaled(reg_gm, 1.0);
    const double objective = pkd_objective(lambda, loss_system, loss_teacher,
                                           reg_plus + reg_minus);
    if (!std::isfinite(objective)) {
      throw TrainingDiverged("train_blend: non-finite loss at step " + std::to_string(step));
    }

    adam_step(m.w_plus, gp, adam_plus);
    adam_step(m.w_minus, gm, adam_minus);

    if (step % h.check_interval == 0) {
      const double val_loss = masked_loss(m.w_plus, m.w_minus, val_all);
      if (!std::isfinite(val_loss)) {
        throw TrainingDiverged("train_blend: non-finite validation loss at step " +
                               std::to_string(step));
      }
      val_history.push_back(val_loss);
      result.log.push_back({step, objective, val_loss, lambda});
      if (val_loss < best_val) {
        best_val = val_loss;
        best_plus = m.w_plus;
        best_minus = m.w_minus;
        have_snapshot = true;
      }
      if (early_stop_check(val_history, h.patience).stop) break;
    }
  }

  if (have_snapshot) {
    m.w_plus = std::move(best_plus);
    m.w_minus = std::move(best_minus);
    result.best_val_loss = best_val;
  } else {
    // no validation check ever ran; keep the final parameters
    result.best_val_loss = masked_loss(m.w_plus, m.w_minus, val_all);
  }
  result.stopped_at_step = std::min(step, h.max_steps);
  result.model = std::move(m);
  result.model.validate();
  return result;
}

// Fits normalization on the system data alone, then minimizes the system loss
// plus L2 regularization.
inline TrainResult train_lfs(const Dataset& d_system, const Dataset& d_val,
                             const RobotModel& robot, const TrainHyper& h) {
  if (d_system.empty()) throw ConfigError("train_lfs: system dataset is empty");
  TrainHyper h2 = h;
  h2.lambda_hi = 0.0;
  h2.lambda_lo = 0.0;
  const NormParams norm = fit_norm_params(d_system);
  return train_blend(d_system, d_val, Dataset{}, norm, robot.name, robot.kinds(), h2);
}

// Distillation path: materialize the teacher set once, fit normalization on
// the union of system and teacher data, then blend both losses with the
// scheduled lambda.
inline TrainResult train_pkd(const Dataset& d_system, const Dataset& d_val,
                             const TeacherModel& teacher, const TrainHyper& h) {
  Rng rng_sample(derive_seed(h.seed, {3}));
  const Dataset d_teacher = sample_teacher(teacher, h.t_p, teacher.robot.limits_lo(),
                                           teacher.robot.limits_hi(), rng_sample);
  const Dataset d_joint = d_system.empty() ? d_teacher : merge(d_system, d_teacher);
  const NormParams norm = fit_norm_params(d_joint);
  return train_blend(d_system, d_val, d_teacher, norm, teacher.robot.name,
                     teacher.robot.kinds(), h);
}

}  // namespace gcl
