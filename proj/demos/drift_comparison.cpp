// Online test: release the arm at random poses under different feedforward
// controllers and report how far it drifts in 2 seconds.

#include <cstdio>

#include "gcl/gcl.hpp"

int main() {
  const gcl::Plant plant = gcl::desk_plant();
  const gcl::JointVector lo = plant.robot.limits_lo();
  const gcl::JointVector hi = plant.robot.limits_hi();
  const std::uint64_t seed = 11;
  const int n_points = 25;

  gcl::Rng rng_train(gcl::derive_seed(seed, {1}));
  const gcl::Dataset d_train = gcl::collect_dataset(
      plant, gcl::random_sample_states(lo, hi, 2000, rng_train), rng_train);
  gcl::Rng rng_val(gcl::derive_seed(seed, {2}));
  const gcl::Dataset d_val = gcl::collect_dataset(
      plant, gcl::random_sample_states(lo, hi, 500, rng_val), rng_val);

  gcl::Rng rng_teacher(gcl::derive_seed(seed, {3}));
  const gcl::TeacherModel teacher = gcl::make_biased_teacher(plant, 0.05, rng_teacher);
  std::printf("training distilled model on %zu measured samples...\n", d_train.size());
  const gcl::TrainResult pkd = gcl::train_pkd(d_train, d_val, teacher, gcl::desk_hyper(seed));

  const gcl::GccParams gcc = gcl::GccParams::defaults(plant.n());
  struct Row {
    const char* name;
    gcl::TorquePolicy policy;
  };
  const std::vector<Row> rows = {
      {"oracle", gcl::make_oracle_policy(plant)},
      {"teacher", gcl::make_teacher_policy(teacher, gcc)},
      {"pkd", gcl::make_gcc_policy(gcl::GccController{pkd.model, gcc})},
  };

  std::printf("\n%-8s %16s %14s\n", "policy", "mean drift (deg)", "cart (mm)");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    gcl::Rng rng(gcl::derive_seed(seed, {4, i}));
    const gcl::DriftReport r = gcl::drift_test(plant, rows[i].policy, n_points, rng);
    std::printf("%-8s %16.6f %14.3f\n", rows[i].name, r.avg_drift_mean_deg, r.cart_mean_mm);
  }
  return 0;
}
