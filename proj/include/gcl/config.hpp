#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/controller.hpp"
#include "gcl/learning.hpp"
#include "gcl/plant.hpp"
#include "gcl/robot.hpp"
#include "gcl/robot_io.hpp"
#include "gcl/textio.hpp"

namespace gcl {

enum class SamplingMode { random, grid };

// Everything an experiment needs, read from one versioned text file. The
// robot path is resolved relative to the config file's directory; out_dir and
// seed can be overridden on the command line.
struct ExperimentConfig {
  std::string robot_path;
  RobotModel robot;
  DisturbanceParams disturbance;
  NoiseParams noise;
  DriftDynParams drift;
  double sigma_p_low = 0.05;
  double sigma_p_high = 0.30;
  SamplingMode sampling = SamplingMode::random;
  int train_count = 1000;     // random mode
  int grid_points = 4;        // grid mode, points per joint
  double grid_dq_mag = 0.005;
  int val_count = 2000;
  int test_count = 300;
  TrainHyper train;
  GccParams gcc;
  std::vector<int> curve_t_s{10, 50, 200, 1000, 5000};
  int curve_seeds = 5;
  int drift_points = 100;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  Plant plant() const {
    Plant p;
    p.robot = robot;
    p.disturbance = disturbance;
    p.noise = noise;
    p.drift = drift;
    p.validate();
    return p;
  }

  void validate() const {
    plant();
    train.validate();
    gcc.validate();
    require_dim(gcc.dq_db, robot.n(), "ExperimentConfig: gcc dq_db");
    if (sigma_p_low < 0.0 || sigma_p_high < 0.0) {
      throw ConfigError("ExperimentConfig: teacher bias levels must be >= 0");
    }
    if (train_count < 1 || grid_points < 2 || grid_dq_mag <= 0.0 || val_count < 1 ||
        test_count < 1 || curve_seeds < 1 || drift_points < 1) {
      throw ConfigError("ExperimentConfig: counts must be positive (grid_points >= 2)");
    }
    for (int t : curve_t_s) {
      if (t < 1) throw ConfigError("ExperimentConfig: curve T_s values must be >= 1");
    }
    if (out_dir.empty()) throw ConfigError("ExperimentConfig: out_dir must be set");
  }
};

inline std::uint64_t parse_u64(const std::string& tok, const char* what) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') {
    throw CorruptFileError(std::string(what) + ": bad unsigned integer '" + tok + "'");
  }
  return v;
}

inline void save_config(const std::string& path, const ExperimentConfig& c) {
  std::ofstream out = open_output(path);
  out << "gcl-config v1\n";
  out << "robot " << c.robot_path << "\n";
  out << "out " << c.out_dir << "\n";
  out << "seed " << c.seed << "\n";
  write_disturbance(out, c.disturbance);
  out << "noise " << format_double(c.noise.sigma_q) << " " << format_double(c.noise.sigma_tau)
      << "\n";
  out << "drift\n";
  out << "  inertia " << join_doubles(c.drift.inertia) << "\n";
  out << "  damping " << join_doubles(c.drift.damping) << "\n";
  out << "  rate " << format_double(c.drift.rate) << "\n";
  out << "  duration " << format_double(c.drift.duration) << "\n";
  out << "teacher_bias " << format_double(c.sigma_p_low) << " " << format_double(c.sigma_p_high)
      << "\n";
  if (c.sampling == SamplingMode::random) {
    out << "sampling random " << c.train_count << " " << c.val_count << " " << c.test_count
        << "\n";
  } else {
    out << "sampling grid " << c.grid_points << " " << format_double(c.grid_dq_mag) << " "
        << c.val_count << " " << c.test_count << "\n";
  }
  out << "train\n";
  out << "  max_steps " << c.train.max_steps << "\n";
  out << "  batch_size " << c.train.batch_size << "\n";
  out << "  lr " << format_double(c.train.lr) << "\n";
  out << "  beta1 " << format_double(c.train.beta1) << "\n";
  out << "  beta2 " << format_double(c.train.beta2) << "\n";
  out << "  eps " << format_double(c.train.eps) << "\n";
  out << "  l2_coeff " << format_double(c.train.l2_coeff) << "\n";
  out << "  patience " << c.train.patience << "\n";
  out << "  check_interval " << c.train.check_interval << "\n";
  out << "  lambda " << format_double(c.train.lambda_hi) << " " << format_double(c.train.lambda_lo)
      << "\n";
  out << "  t_p " << c.train.t_p << "\n";
  out << "  hidden";
  for (int h : c.train.hidden_dims) out << " " << h;
  out << "\n";
  out << "gcc\n";
  out << "  alpha " << format_double(c.gcc.alpha) << "\n";
  out << "  dq_db " << join_doubles(c.gcc.dq_db) << "\n";
  out << "  dq_s " << join_doubles(c.gcc.dq_s) << "\n";
  out << "curve\n";
  out << "  t_s";
  for (int t : c.curve_t_s) out << " " << t;
  out << "\n";
  out << "  seeds " << c.curve_seeds << "\n";
  out << "drift_points " << c.drift_points << "\n";
  out << "end\n";
  if (!out) throw CorruptFileError("save_config: write failed for " + path);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in = open_input(path);
  TextReader r(in, path);
  check_format_header(r, "gcl-config");
  ExperimentConfig c;
  {
    const auto tokens = r.require_line("robot");
    if (tokens.size() != 2 || tokens[0] != "robot") r.fail("expected 'robot <path>'");
    c.robot_path = tokens[1];
  }
  {
    const auto tokens = r.require_line("out");
    if (tokens.size() != 2 || tokens[0] != "out") r.fail("expected 'out <dir>'");
    c.out_dir = tokens[1];
  }
  {
    const auto tokens = r.require_line("seed");
    if (tokens.size() != 2 || tokens[0] != "seed") r.fail("expected 'seed <u64>'");
    c.seed = parse_u64(tokens[1], "seed");
  }
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  c.robot = load_robot((base / c.robot_path).string());
  c.disturbance = read_disturbance(r);
  {
    const Eigen::VectorXd v = detail::expect_numbers(r, "noise", 2);
    c.noise.sigma_q = v[0];
    c.noise.sigma_tau = v[1];
  }
  {
    const auto head = r.require_line("drift");
    if (head.size() != 1 || head[0] != "drift") r.fail("expected 'drift'");
    c.drift.inertia = detail::expect_numbers(r, "inertia", c.robot.n());
    c.drift.damping = detail::expect_numbers(r, "damping", c.robot.n());
    c.drift.rate = detail::expect_numbers(r, "rate", 1)[0];
    c.drift.duration = detail::expect_numbers(r, "duration", 1)[0];
  }
  {
    const Eigen::VectorXd v = detail::expect_numbers(r, "teacher_bias", 2);
    c.sigma_p_low = v[0];
    c.sigma_p_high = v[1];
  }
  {
    const auto tokens = r.require_line("sampling");
    if (tokens.size() < 2 || tokens[0] != "sampling") r.fail("expected 'sampling <mode> ...'");
    if (tokens[1] == "random") {
      if (tokens.size() != 5) r.fail("expected 'sampling random <train> <val> <test>'");
      c.sampling = SamplingMode::random;
      c.train_count = static_cast<int>(parse_long(tokens[2], "train count"));
      c.val_count = static_cast<int>(parse_long(tokens[3], "val count"));
      c.test_count = static_cast<int>(parse_long(tokens[4], "test count"));
    } else if (tokens[1] == "grid") {
      if (tokens.size() != 6) r.fail("expected 'sampling grid <points> <dq_mag> <val> <test>'");
      c.sampling = SamplingMode::grid;
      c.grid_points = static_cast<int>(parse_long(tokens[2], "grid points"));
      c.grid_dq_mag = parse_double(tokens[3], "grid dq_mag");
      c.val_count = static_cast<int>(parse_long(tokens[4], "val count"));
      c.test_count = static_cast<int>(parse_long(tokens[5], "test count"));
    } else {
      r.fail("sampling mode must be 'random' or 'grid'");
    }
  }
  {
    const auto head = r.require_line("train");
    if (head.size() != 1 || head[0] != "train") r.fail("expected 'train'");
    c.train.max_steps = static_cast<long>(detail::expect_numbers(r, "max_steps", 1)[0]);
    c.train.batch_size = static_cast<int>(detail::expect_numbers(r, "batch_size", 1)[0]);
    c.train.lr = detail::expect_numbers(r, "lr", 1)[0];
    c.train.beta1 = detail::expect_numbers(r, "beta1", 1)[0];
    c.train.beta2 = detail::expect_numbers(r, "beta2", 1)[0];
    c.train.eps = detail::expect_numbers(r, "eps", 1)[0];
    c.train.l2_coeff = detail::expect_numbers(r, "l2_coeff", 1)[0];
    c.train.patience = static_cast<int>(detail::expect_numbers(r, "patience", 1)[0]);
    c.train.check_interval =
        static_cast<long>(detail::expect_numbers(r, "check_interval", 1)[0]);
    const Eigen::VectorXd lambda = detail::expect_numbers(r, "lambda", 2);
    c.train.lambda_hi = lambda[0];
    c.train.lambda_lo = lambda[1];
    c.train.t_p = static_cast<int>(detail::expect_numbers(r, "t_p", 1)[0]);
    const auto hidden = r.require_line("hidden");
    if (hidden.size() < 2 || hidden[0] != "hidden") r.fail("expected 'hidden <dims...>'");
    c.train.hidden_dims.clear();
    for (std::size_t i = 1; i < hidden.size(); ++i) {
      c.train.hidden_dims.push_back(static_cast<int>(parse_long(hidden[i], "hidden dim")));
    }
    c.train.seed = c.seed;
  }
  {
    const auto head = r.require_line("gcc");
    if (head.size() != 1 || head[0] != "gcc") r.fail("expected 'gcc'");
    c.gcc.alpha = detail::expect_numbers(r, "alpha", 1)[0];
    c.gcc.dq_db = detail::expect_numbers(r, "dq_db", c.robot.n());
    c.gcc.dq_s = detail::expect_numbers(r, "dq_s", c.robot.n());
  }
  {
    const auto head = r.require_line("curve");
    if (head.size() != 1 || head[0] != "curve") r.fail("expected 'curve'");
    const auto t_s = r.require_line("t_s");
    if (t_s.size() < 2 || t_s[0] != "t_s") r.fail("expected 't_s <values...>'");
    c.curve_t_s.clear();
    for (std::size_t i = 1; i < t_s.size(); ++i) {
      c.curve_t_s.push_back(static_cast<int>(parse_long(t_s[i], "t_s value")));
    }
    c.curve_seeds = static_cast<int>(detail::expect_numbers(r, "seeds", 1)[0]);
  }
  c.drift_points = static_cast<int>(detail::expect_numbers(r, "drift_points", 1)[0]);
  expect_end(r);
  c.validate();
  return c;
}

}  // namespace gcl
