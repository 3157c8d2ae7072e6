// Minimal end-to-end walkthrough on the built-in desk arm: measure a small
// training set, train both ways against a low-bias analytic teacher, and
// compare offline accuracy on a clean test set.

#include <cstdio>

#include "gcl/gcl.hpp"

int main() {
  const gcl::Plant plant = gcl::desk_plant();
  const gcl::JointVector lo = plant.robot.limits_lo();
  const gcl::JointVector hi = plant.robot.limits_hi();
  const std::uint64_t seed = 7;

  gcl::Rng rng_train(gcl::derive_seed(seed, {1}));
  const gcl::Dataset d_train = gcl::collect_dataset(
      plant, gcl::random_sample_states(lo, hi, 200, rng_train), rng_train);
  gcl::Rng rng_val(gcl::derive_seed(seed, {2}));
  const gcl::Dataset d_val = gcl::collect_dataset(
      plant, gcl::random_sample_states(lo, hi, 500, rng_val), rng_val);
  const gcl::Dataset d_test = gcl::make_test_set(plant, 300, seed);

  gcl::Rng rng_teacher(gcl::derive_seed(seed, {3}));
  const gcl::TeacherModel teacher = gcl::make_biased_teacher(plant, 0.05, rng_teacher);

  gcl::TrainHyper hyper = gcl::desk_hyper(seed);
  std::printf("training from scratch on %zu measured samples...\n", d_train.size());
  const gcl::TrainResult lfs = gcl::train_lfs(d_train, d_val, plant.robot, hyper);
  std::printf("training with distillation from the analytic teacher...\n");
  const gcl::TrainResult pkd = gcl::train_pkd(d_train, d_val, teacher, hyper);

  const gcl::RrmseReport r_teacher = gcl::offline_eval(teacher, d_test);
  const gcl::RrmseReport r_lfs = gcl::offline_eval(lfs.model, d_test);
  const gcl::RrmseReport r_pkd = gcl::offline_eval(pkd.model, d_test);

  std::printf("\noffline RRMSE (%% average over joints, %zu test states):\n", d_test.size());
  std::printf("  teacher (biased physics): %7.2f\n", r_teacher.average);
  std::printf("  trained from scratch:     %7.2f\n", r_lfs.average);
  std::printf("  distilled + measured:     %7.2f\n", r_pkd.average);
  return 0;
}
