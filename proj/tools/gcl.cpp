#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gcl/gcl.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitMissing = 4;

struct MissingArtifact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliOptions {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  int jobs = 1;
};

gcl::ExperimentConfig load_effective_config(const CliOptions& opt) {
  gcl::ExperimentConfig cfg = gcl::load_config(opt.config_path);
  if (opt.has_seed_override) {
    cfg.seed = opt.seed_override;
    cfg.train.seed = opt.seed_override;
  }
  if (!opt.out_override.empty()) cfg.out_dir = opt.out_override;
  return cfg;
}

void require_artifact(const fs::path& p) {
  if (!fs::exists(p)) throw MissingArtifact("missing artifact: " + p.string());
}

// Training and validation sets are measured with noise; the test set is
// noise-free so offline error is judged against the truth.
int cmd_sample(const CliOptions& opt) {
  const gcl::ExperimentConfig cfg = load_effective_config(opt);
  const gcl::Plant plant = cfg.plant();
  const gcl::JointVector lo = plant.robot.limits_lo();
  const gcl::JointVector hi = plant.robot.limits_hi();
  fs::create_directories(cfg.out_dir);

  std::vector<gcl::SampledState> train_states;
  if (cfg.sampling == gcl::SamplingMode::grid) {
    train_states = gcl::systematic_sample_grid(lo, hi, cfg.grid_points, cfg.grid_dq_mag);
  } else {
    gcl::Rng rng(gcl::derive_seed(cfg.seed, {20}));
    train_states = gcl::random_sample_states(lo, hi, cfg.train_count, rng);
  }
  gcl::Rng rng_train_noise(gcl::derive_seed(cfg.seed, {22}));
  const gcl::Dataset d_train = gcl::collect_dataset(plant, train_states, rng_train_noise);

  gcl::Rng rng_val(gcl::derive_seed(cfg.seed, {21}));
  const gcl::Dataset d_val = gcl::collect_dataset(
      plant, gcl::random_sample_states(lo, hi, cfg.val_count, rng_val), rng_val);
  const gcl::Dataset d_test = gcl::make_test_set(plant, cfg.test_count, cfg.seed);

  const fs::path out(cfg.out_dir);
  gcl::save_dataset((out / "train.csv").string(), d_train);
  gcl::save_dataset((out / "val.csv").string(), d_val);
  gcl::save_dataset((out / "test.csv").string(), d_test);
  {
    std::ofstream manifest = gcl::open_output((out / "manifest.txt").string());
    manifest << "gcl-manifest v1\n";
    manifest << "train " << d_train.size() << "\n";
    manifest << "val " << d_val.size() << "\n";
    manifest << "test " << d_test.size() << "\n";
    manifest << "seed " << cfg.seed << "\n";
  }
  std::printf("sampled train=%zu val=%zu test=%zu -> %s\n", d_train.size(), d_val.size(),
              d_test.size(), cfg.out_dir.c_str());
  return kExitOk;
}

int cmd_train(const CliOptions& opt, const std::string& method) {
  const gcl::ExperimentConfig cfg = load_effective_config(opt);
  const fs::path out(cfg.out_dir);
  require_artifact(out / "train.csv");
  require_artifact(out / "val.csv");
  const gcl::Dataset d_train = gcl::load_dataset((out / "train.csv").string());
  const gcl::Dataset d_val = gcl::load_dataset((out / "val.csv").string());

  gcl::TrainHyper hyper = cfg.train;
  hyper.seed = cfg.seed;
  gcl::TrainResult result;
  if (method == "pkd") {
    gcl::Rng rng_teacher(gcl::derive_seed(cfg.seed, {30}));
    const gcl::TeacherModel teacher =
        gcl::make_biased_teacher(cfg.plant(), cfg.sigma_p_low, rng_teacher);
    gcl::save_teacher((out / "teacher.gcl").string(), teacher);
    result = gcl::train_pkd(d_train, d_val, teacher, hyper);
  } else {
    result = gcl::train_lfs(d_train, d_val, cfg.robot, hyper);
  }

  const std::string model_path = (out / ("model_" + method + ".gcl")).string();
  gcl::save_model(model_path, result.model);
  {
    std::ofstream log = gcl::open_output((out / ("train_" + method + ".csv")).string());
    gcl::write_csv_row(log, {"step", "train_loss", "val_loss", "lambda"});
    for (const gcl::TrainLogRow& row : result.log) {
      gcl::write_csv_row(log, {std::to_string(row.step), gcl::format_double(row.train_loss),
                               gcl::format_double(row.val_loss), gcl::format_double(row.lambda)});
    }
  }
  std::printf("trained %s: %ld steps, best val loss %.6g -> %s\n", method.c_str(),
              result.stopped_at_step, result.best_val_loss, model_path.c_str());
  return kExitOk;
}

void print_rrmse_table(const std::vector<std::pair<std::string, gcl::RrmseReport>>& rows) {
  if (rows.empty()) return;
  const Eigen::Index n = rows.front().second.per_joint.size();
  std::printf("%-10s", "model");
  for (Eigen::Index j = 1; j <= n; ++j) std::printf(" %9s%lld", "rrmse_", static_cast<long long>(j));
  std::printf(" %10s\n", "average");
  for (const auto& [name, r] : rows) {
    std::printf("%-10s", name.c_str());
    for (Eigen::Index j = 0; j < n; ++j) std::printf(" %10.3f", r.per_joint[j]);
    std::printf(" %10.3f\n", r.average);
  }
}

int cmd_evaluate(const CliOptions& opt, const std::string& mode) {
  const gcl::ExperimentConfig cfg = load_effective_config(opt);
  const gcl::Plant plant = cfg.plant();
  const fs::path out(cfg.out_dir);

  if (mode == "offline") {
    require_artifact(out / "test.csv");
    const gcl::Dataset d_test = gcl::load_dataset((out / "test.csv").string());
    std::vector<std::pair<std::string, gcl::RrmseReport>> rows;
    rows.emplace_back("oracle", gcl::offline_eval(plant, d_test));
    if (fs::exists(out / "teacher.gcl")) {
      rows.emplace_back("teacher",
                        gcl::offline_eval(gcl::load_teacher((out / "teacher.gcl").string()),
                                          d_test));
    }
    for (const char* method : {"lfs", "pkd"}) {
      const fs::path model_path = out / (std::string("model_") + method + ".gcl");
      if (fs::exists(model_path)) {
        rows.emplace_back(method, gcl::offline_eval(gcl::load_model(model_path.string()), d_test));
      }
    }
    if (rows.size() == 1) {
      throw MissingArtifact("no trained model found under " + cfg.out_dir +
                            " (expected model_lfs.gcl or model_pkd.gcl)");
    }
    gcl::write_offline_csv((out / "offline.csv").string(), rows);
    print_rrmse_table(rows);
    return kExitOk;
  }

  if (mode == "drift") {
    std::vector<std::pair<std::string, gcl::DriftReport>> reports;
    auto run = [&](const std::string& name, const gcl::TorquePolicy& policy,
                   std::uint64_t controller_id) {
      gcl::Rng rng(gcl::derive_seed(cfg.seed, {40, controller_id}));
      reports.emplace_back(name, gcl::drift_test(plant, policy, cfg.drift_points, rng));
    };
    run("oracle", gcl::make_oracle_policy(plant), 0);
    if (fs::exists(out / "teacher.gcl")) {
      run("teacher",
          gcl::make_teacher_policy(gcl::load_teacher((out / "teacher.gcl").string()), cfg.gcc), 1);
    }
    bool any_model = false;
    std::uint64_t id = 2;
    for (const char* method : {"lfs", "pkd"}) {
      const fs::path model_path = out / (std::string("model_") + method + ".gcl");
      if (fs::exists(model_path)) {
        any_model = true;
        gcl::GccController c{gcl::load_model(model_path.string()), cfg.gcc};
        run(method, gcl::make_gcc_policy(std::move(c)), id);
      }
      ++id;
    }
    if (!any_model) {
      throw MissingArtifact("no trained model found under " + cfg.out_dir +
                            " (expected model_lfs.gcl or model_pkd.gcl)");
    }
    gcl::write_drift_csv((out / "drift.csv").string(), reports);
    std::printf("%-10s %14s %14s %12s %8s\n", "controller", "mean_avg_deg", "cart_mean_mm",
                "cart_std_mm", "points");
    for (const auto& [name, r] : reports) {
      std::printf("%-10s %14.6f %14.3f %12.3f %8d\n", name.c_str(), r.avg_drift_mean_deg,
                  r.cart_mean_mm, r.cart_std_mm, r.n_points);
    }
    return kExitOk;
  }

  if (mode == "curve") {
    gcl::Rng rng_teacher(gcl::derive_seed(cfg.seed, {30}));
    const gcl::TeacherModel teacher = gcl::make_biased_teacher(plant, cfg.sigma_p_low, rng_teacher);
    gcl::TrainHyper hyper = cfg.train;
    hyper.seed = cfg.seed;
    const std::vector<gcl::CurvePoint> points = gcl::learning_curve(
        plant, teacher, cfg.curve_t_s, cfg.curve_seeds, hyper, cfg.val_count, cfg.test_count,
        opt.jobs);
    fs::create_directories(cfg.out_dir);
    gcl::write_curve_csv((out / "curve.csv").string(), points, plant.n());
    std::printf("%-6s %6s %6s %10s %10s %7s\n", "method", "T_s", "seeds", "mean", "std", "failed");
    for (const gcl::CurvePoint& pt : points) {
      std::printf("%-6s %6d %6zu %10.3f %10.3f %7zu\n", pt.method.c_str(), pt.t_s,
                  pt.per_seed.size(), pt.mean, pt.stddev, pt.failed_seeds.size());
    }
    return kExitOk;
  }

  throw gcl::ConfigError("unknown evaluate mode '" + mode + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gravity-compensation learning toolkit"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string method = "lfs";
  std::string mode = "offline";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "experiment config file")->required();
    sub->add_option("--seed", opt.seed_override, "override the config's master seed")
        ->each([&](const std::string&) { opt.has_seed_override = true; });
    sub->add_option("--out", opt.out_override, "override the config's output directory");
    sub->add_option("--jobs", opt.jobs, "parallel tasks for sweeps")->check(CLI::PositiveNumber);
  };

  CLI::App* sample = app.add_subcommand("sample", "generate train/val/test datasets");
  add_common(sample);
  CLI::App* train = app.add_subcommand("train", "train a compensation model");
  add_common(train);
  train->add_option("--method", method, "training method")
      ->check(CLI::IsMember({"lfs", "pkd"}))
      ->required();
  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate trained models");
  add_common(evaluate);
  evaluate->add_option("--mode", mode, "evaluation protocol")
      ->check(CLI::IsMember({"offline", "drift", "curve"}))
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) return cmd_sample(opt);
    if (train->parsed()) return cmd_train(opt, method);
    if (evaluate->parsed()) return cmd_evaluate(opt, mode);
    std::fprintf(stderr, "no subcommand given\n");
    return kExitOther;
  } catch (const gcl::TrainingDiverged& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const MissingArtifact& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitMissing;
  } catch (const gcl::VersionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const gcl::CorruptFileError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const gcl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
}
