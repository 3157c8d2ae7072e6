#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/controller.hpp"
#include "gcl/dataset.hpp"
#include "gcl/learning.hpp"
#include "gcl/model.hpp"
#include "gcl/parallel.hpp"
#include "gcl/plant.hpp"
#include "gcl/teacher.hpp"
#include "gcl/textio.hpp"

namespace gcl {

struct RrmseReport {
  Eigen::VectorXd per_joint;          // percent
  double average = 0.0;               // mean of per_joint
  long n_samples = 0;
  std::vector<long> excluded;         // per joint, targets below the magnitude floor

  long total_excluded() const {
    long t = 0;
    for (long e : excluded) t += e;
    return t;
  }
};

// Relative RMS error per joint in percent. Targets with |tau| < 1e-6 N*m are
// excluded from that joint's sum (the ratio is undefined near zero) and
// counted; a joint left with no admissible samples is an error.
inline RrmseReport rrmse(const std::vector<JointVector>& pred,
                         const std::vector<JointVector>& target) {
  if (pred.size() != target.size() || pred.empty()) {
    throw DimensionError("rrmse: need equal, nonzero prediction/target counts");
  }
  const Eigen::Index n = target[0].size();
  RrmseReport r;
  r.per_joint.resize(n);
  r.n_samples = static_cast<long>(pred.size());
  r.excluded.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    long admissible = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      require_dim(pred[i], n, "rrmse: pred");
      require_dim(target[i], n, "rrmse: target");
      const double t = target[i][j];
      if (std::abs(t) < 1e-6) {
        ++r.excluded[static_cast<std::size_t>(j)];
        continue;
      }
      const double e = t - pred[i][j];
      acc += (e * e) / (t * t);
      ++admissible;
    }
    if (admissible == 0) {
      throw NumericError("rrmse: joint " + std::to_string(j + 1) +
                         " has no admissible samples (all targets below 1e-6)");
    }
    r.per_joint[j] = std::sqrt(acc / static_cast<double>(admissible)) * 100.0;
  }
  r.average = r.per_joint.mean();
  return r;
}

inline RrmseReport offline_eval(const CompensationModel& m, const Dataset& d_test) {
  if (d_test.empty()) throw ConfigError("offline_eval: empty test set");
  std::vector<JointVector> pred, target;
  pred.reserve(d_test.size());
  target.reserve(d_test.size());
  for (const Sample& s : d_test.samples) {
    pred.push_back(predict_from_encoded(m, s.x1, s.x2));
    target.push_back(s.y);
  }
  return rrmse(pred, target);
}

inline RrmseReport offline_eval(const TeacherModel& t, const Dataset& d_test) {
  if (d_test.empty()) throw ConfigError("offline_eval: empty test set");
  const std::vector<JointKind> kinds = t.robot.kinds();
  std::vector<JointVector> pred, target;
  pred.reserve(d_test.size());
  target.reserve(d_test.size());
  for (const Sample& s : d_test.samples) {
    pred.push_back(teacher_predict(t, trig_decode(s.x1, kinds), s.x2));
    target.push_back(s.y);
  }
  return rrmse(pred, target);
}

// Oracle baseline: the plant's own truth, useful as a zero-error reference on
// noiseless data.
inline RrmseReport offline_eval(const Plant& p, const Dataset& d_test) {
  if (d_test.empty()) throw ConfigError("offline_eval: empty test set");
  const std::vector<JointKind> kinds = p.robot.kinds();
  std::vector<JointVector> pred, target;
  pred.reserve(d_test.size());
  target.reserve(d_test.size());
  for (const Sample& s : d_test.samples) {
    pred.push_back(true_compensation_torque(p, trig_decode(s.x1, kinds), s.x2));
    target.push_back(s.y);
  }
  return rrmse(pred, target);
}

struct DriftPoint {
  JointVector q0;
  JointVector drift_deg;
  double cart_mm = 0.0;
};

struct DriftReport {
  std::vector<DriftPoint> points;     // successful points only
  Eigen::VectorXd mean_deg, std_deg;  // per joint over points
  double cart_mean_mm = 0.0, cart_std_mm = 0.0;
  double avg_drift_mean_deg = 0.0;    // per-point joint-average, then mean/std over points
  double avg_drift_std_deg = 0.0;
  int n_points = 0;
  int failed = 0;

  void finalize(int joints) {
    n_points = static_cast<int>(points.size());
    mean_deg = Eigen::VectorXd::Zero(joints);
    std_deg = Eigen::VectorXd::Zero(joints);
    if (points.empty()) return;
    const double inv = 1.0 / static_cast<double>(points.size());
    double cart_acc = 0.0, avg_acc = 0.0;
    for (const DriftPoint& pt : points) {
      mean_deg += pt.drift_deg;
      cart_acc += pt.cart_mm;
      avg_acc += pt.drift_deg.mean();
    }
    mean_deg *= inv;
    cart_mean_mm = cart_acc * inv;
    avg_drift_mean_deg = avg_acc * inv;
    double cart_var = 0.0, avg_var = 0.0;
    for (const DriftPoint& pt : points) {
      std_deg += (pt.drift_deg - mean_deg).cwiseAbs2();
      cart_var += (pt.cart_mm - cart_mean_mm) * (pt.cart_mm - cart_mean_mm);
      const double d = pt.drift_deg.mean() - avg_drift_mean_deg;
      avg_var += d * d;
    }
    std_deg = (std_deg * inv).cwiseSqrt();
    cart_std_mm = std::sqrt(cart_var * inv);
    avg_drift_std_deg = std::sqrt(avg_var * inv);
  }
};

// Release the arm at random in-limits points under the given feedforward
// policy and record how far it settles from where it started. Integrator
// aborts are excluded and counted rather than failing the whole test.
inline DriftReport drift_test(const Plant& p, const TorquePolicy& policy, int n_points, Rng& rng) {
  if (n_points < 1) throw ConfigError("drift_test: n_points must be >= 1");
  const int n = p.n();
  const JointVector lo = p.robot.limits_lo();
  const JointVector hi = p.robot.limits_hi();
  DriftReport report;
  report.points.reserve(static_cast<std::size_t>(n_points));
  JointVector q0(n), dq0(n);
  for (int k = 0; k < n_points; ++k) {
    for (int i = 0; i < n; ++i) {
      q0[i] = rng.uniform(lo[i], hi[i]);
      dq0[i] = rng.sign() * rng.uniform(1e-3, 0.05);
    }
    try {
      const DriftResult r = simulate_drift(p, policy, q0, dq0);
      report.points.push_back({q0, r.drift_deg, r.cart_drift_mm});
    } catch (const NumericError&) {
      ++report.failed;
    }
  }
  report.finalize(n);
  return report;
}

struct CurvePoint {
  std::string method;                  // "lfs" or "pkd"
  int t_s = 0;
  std::vector<RrmseReport> per_seed;   // index = repetition
  std::vector<int> failed_seeds;       // repetitions whose training diverged
  double mean = 0.0;                   // over successful repetitions' averages
  double stddev = 0.0;

  void finalize() {
    if (per_seed.empty()) {
      mean = stddev = 0.0;
      return;
    }
    double acc = 0.0;
    for (const RrmseReport& r : per_seed) acc += r.average;
    mean = acc / static_cast<double>(per_seed.size());
    double var = 0.0;
    for (const RrmseReport& r : per_seed) var += (r.average - mean) * (r.average - mean);
    stddev = std::sqrt(var / static_cast<double>(per_seed.size()));
  }
};

// Fixed noise-free test set shared by every sweep cell, so curve points are
// comparable across methods and seeds.
inline Dataset make_test_set(const Plant& p, int count, std::uint64_t master_seed) {
  Plant clean = p;
  clean.noise = NoiseParams{};
  Rng rng(derive_seed(master_seed, {100}));
  const auto states = random_sample_states(p.robot.limits_lo(), p.robot.limits_hi(), count, rng);
  return collect_dataset(clean, states, rng);
}

struct CurveCell {
  std::string method;
  int t_s = 0;
  int rep = 0;
};

// One sweep cell: fresh training and validation data under the cell's derived
// seed, one full training run, then evaluation on the shared test set.
// Everything the cell does depends only on (master seed, method, T_s, rep),
// so any cell can be recomputed in isolation.
inline RrmseReport run_curve_cell(const Plant& plant, const TeacherModel& teacher,
                                  const CurveCell& cell, const TrainHyper& hyper,
                                  const Dataset& d_test, int val_count) {
  const std::uint64_t method_id = cell.method == "pkd" ? 2 : 1;
  const std::uint64_t cell_seed = derive_seed(
      hyper.seed, {method_id, static_cast<std::uint64_t>(cell.t_s),
                   static_cast<std::uint64_t>(cell.rep)});
  const JointVector lo = plant.robot.limits_lo();
  const JointVector hi = plant.robot.limits_hi();

  Rng rng_train(derive_seed(cell_seed, {10}));
  const Dataset d_train =
      collect_dataset(plant, random_sample_states(lo, hi, cell.t_s, rng_train), rng_train);
  Rng rng_val(derive_seed(cell_seed, {11}));
  const Dataset d_val =
      collect_dataset(plant, random_sample_states(lo, hi, val_count, rng_val), rng_val);

  TrainHyper h = hyper;
  h.seed = cell_seed;
  const TrainResult result = cell.method == "pkd"
                                 ? train_pkd(d_train, d_val, teacher, h)
                                 : train_lfs(d_train, d_val, plant.robot, h);
  return offline_eval(result.model, d_test);
}

// Full sweep over methods, sample counts and repetitions. hyper.seed acts as
// the master seed; cells run as independent tasks when jobs > 1.
inline std::vector<CurvePoint> learning_curve(const Plant& plant, const TeacherModel& teacher,
                                              const std::vector<int>& t_s_list, int seeds,
                                              const TrainHyper& hyper, int val_count = 2000,
                                              int test_count = 300, int jobs = 1) {
  if (seeds < 1) throw ConfigError("learning_curve: need at least 1 seed");
  for (int t : t_s_list) {
    if (t < 1) throw ConfigError("learning_curve: T_s values must be >= 1");
  }
  const Dataset d_test = make_test_set(plant, test_count, hyper.seed);

  struct CellSlot {
    CurveCell cell;
    RrmseReport report;
    bool diverged = false;
  };
  std::vector<CellSlot> slots;
  for (const char* method : {"lfs", "pkd"}) {
    for (int t_s : t_s_list) {
      for (int rep = 0; rep < seeds; ++rep) {
        slots.push_back({CurveCell{method, t_s, rep}, RrmseReport{}, false});
      }
    }
  }
  std::vector<std::function<void()>> tasks;
  tasks.reserve(slots.size());
  for (CellSlot& slot : slots) {
    tasks.push_back([&slot, &plant, &teacher, &hyper, &d_test, val_count]() {
      try {
        slot.report = run_curve_cell(plant, teacher, slot.cell, hyper, d_test, val_count);
      } catch (const TrainingDiverged&) {
        slot.diverged = true;
      }
    });
  }
  run_tasks(tasks, jobs);

  std::vector<CurvePoint> points;
  for (const char* method : {"lfs", "pkd"}) {
    for (int t_s : t_s_list) {
      CurvePoint pt;
      pt.method = method;
      pt.t_s = t_s;
      for (const CellSlot& slot : slots) {
        if (slot.cell.method != method || slot.cell.t_s != t_s) continue;
        if (slot.diverged) {
          pt.failed_seeds.push_back(slot.cell.rep);
        } else {
          pt.per_seed.push_back(slot.report);
        }
      }
      pt.finalize();
      points.push_back(std::move(pt));
    }
  }
  return points;
}

inline void write_offline_csv(const std::string& path,
                              const std::vector<std::pair<std::string, RrmseReport>>& rows) {
  std::ofstream out = open_output(path);
  if (rows.empty()) throw ConfigError("write_offline_csv: no rows");
  const Eigen::Index n = rows.front().second.per_joint.size();
  std::vector<std::string> header{"model"};
  for (Eigen::Index j = 0; j < n; ++j) header.push_back("rrmse_" + std::to_string(j + 1));
  header.push_back("average");
  write_csv_row(out, header);
  for (const auto& [name, r] : rows) {
    std::vector<std::string> row{name};
    for (Eigen::Index j = 0; j < n; ++j) row.push_back(format_double(r.per_joint[j]));
    row.push_back(format_double(r.average));
    write_csv_row(out, row);
  }
  if (!out) throw CorruptFileError("write_offline_csv: write failed for " + path);
}

// Long format: one row per (point, joint), Cartesian drift repeated per row.
inline void write_drift_csv(const std::string& path,
                            const std::vector<std::pair<std::string, DriftReport>>& reports) {
  std::ofstream out = open_output(path);
  write_csv_row(out, {"controller", "point", "joint", "drift_deg", "cart_drift_mm"});
  for (const auto& [name, report] : reports) {
    for (std::size_t k = 0; k < report.points.size(); ++k) {
      const DriftPoint& pt = report.points[k];
      for (Eigen::Index j = 0; j < pt.drift_deg.size(); ++j) {
        write_csv_row(out, {name, std::to_string(k), std::to_string(j + 1),
                            format_double(pt.drift_deg[j]), format_double(pt.cart_mm)});
      }
    }
  }
  if (!out) throw CorruptFileError("write_drift_csv: write failed for " + path);
}

inline void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& points,
                            int joints) {
  std::ofstream out = open_output(path);
  std::vector<std::string> header{"method", "T_s", "seed", "rrmse_avg"};
  for (int j = 1; j <= joints; ++j) header.push_back("rrmse_" + std::to_string(j));
  write_csv_row(out, header);
  for (const CurvePoint& pt : points) {
    for (std::size_t rep = 0; rep < pt.per_seed.size(); ++rep) {
      const RrmseReport& r = pt.per_seed[rep];
      std::vector<std::string> row{pt.method, std::to_string(pt.t_s), std::to_string(rep),
                                   format_double(r.average)};
      for (Eigen::Index j = 0; j < r.per_joint.size(); ++j) {
        row.push_back(format_double(r.per_joint[j]));
      }
      write_csv_row(out, row);
    }
  }
  if (!out) throw CorruptFileError("write_curve_csv: write failed for " + path);
}

}  // namespace gcl
