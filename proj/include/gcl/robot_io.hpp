#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/plant.hpp"
#include "gcl/robot.hpp"
#include "gcl/textio.hpp"

namespace gcl {

namespace detail {

inline Eigen::VectorXd parse_numbers(TextReader& r, const std::vector<std::string>& tokens,
                                     const char* key, int count) {
  if (tokens.empty() || tokens[0] != key) {
    r.fail(std::string("expected '") + key + "', got '" + (tokens.empty() ? "" : tokens[0]) + "'");
  }
  if (static_cast<int>(tokens.size()) != count + 1) {
    r.fail(std::string(key) + ": expected " + std::to_string(count) + " values, got " +
           std::to_string(tokens.size() - 1));
  }
  Eigen::VectorXd v(count);
  for (int i = 0; i < count; ++i) v[i] = parse_double(tokens[static_cast<std::size_t>(i + 1)], key);
  return v;
}

inline Eigen::VectorXd expect_numbers(TextReader& r, const char* key, int count) {
  return parse_numbers(r, r.require_line(key), key, count);
}

}  // namespace detail

inline void write_robot(std::ostream& out, const RobotModel& robot) {
  out << "name " << robot.name << "\n";
  out << "gravity " << join_doubles(robot.gravity_accel) << "\n";
  out << "links " << robot.n() << "\n";
  for (int i = 0; i < robot.n(); ++i) {
    const LinkParams& l = robot.links[static_cast<std::size_t>(i)];
    out << "link " << (i + 1) << " "
        << (l.kind == JointKind::Revolute ? "revolute" : "prismatic") << "\n";
    out << "  axis " << join_doubles(l.axis) << "\n";
    out << "  offset_xyz " << join_doubles(l.offset_xyz) << "\n";
    out << "  offset_rpy " << join_doubles(l.offset_rpy) << "\n";
    out << "  mass " << format_double(l.mass) << "\n";
    out << "  com " << join_doubles(l.com) << "\n";
    out << "  limits " << format_double(l.limit_lo) << " " << format_double(l.limit_hi) << "\n";
  }
}

inline RobotModel read_robot(TextReader& r) {
  RobotModel robot;
  {
    const auto tokens = r.require_line("name");
    if (tokens.size() != 2 || tokens[0] != "name") r.fail("expected 'name <identifier>'");
    robot.name = tokens[1];
  }
  robot.gravity_accel = detail::expect_numbers(r, "gravity", 3);
  const int n = static_cast<int>(detail::expect_numbers(r, "links", 1)[0]);
  if (n < 1) r.fail("links: need at least 1");
  robot.links.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    LinkParams& l = robot.links[static_cast<std::size_t>(i)];
    const auto tokens = r.require_line("link");
    if (tokens.size() != 3 || tokens[0] != "link") r.fail("expected 'link <index> <kind>'");
    if (parse_long(tokens[1], "link index") != i + 1) r.fail("link blocks must be in order");
    if (tokens[2] == "revolute") {
      l.kind = JointKind::Revolute;
    } else if (tokens[2] == "prismatic") {
      l.kind = JointKind::Prismatic;
    } else {
      r.fail("unknown joint kind '" + tokens[2] + "'");
    }
    l.axis = detail::expect_numbers(r, "axis", 3);
    l.offset_xyz = detail::expect_numbers(r, "offset_xyz", 3);
    l.offset_rpy = detail::expect_numbers(r, "offset_rpy", 3);
    l.mass = detail::expect_numbers(r, "mass", 1)[0];
    l.com = detail::expect_numbers(r, "com", 3);
    const Eigen::VectorXd lim = detail::expect_numbers(r, "limits", 2);
    l.limit_lo = lim[0];
    l.limit_hi = lim[1];
  }
  robot.validate();
  return robot;
}

inline void save_robot(const std::string& path, const RobotModel& robot) {
  robot.validate();
  std::ofstream out = open_output(path);
  out << "gcl-robot v1\n";
  write_robot(out, robot);
  out << "end\n";
  if (!out) throw CorruptFileError("save_robot: write failed for " + path);
}

inline void check_format_header(TextReader& r, const std::string& format) {
  const auto tokens = r.require_line("format header");
  if (tokens.size() != 2 || tokens[0] != format) {
    throw VersionError(r.source() + ": not a " + format + " file");
  }
  if (tokens[1] != "v1") {
    throw VersionError(r.source() + ": unsupported " + format + " version '" + tokens[1] + "'");
  }
}

inline void expect_end(TextReader& r) {
  const auto tokens = r.require_line("end");
  if (tokens.size() != 1 || tokens[0] != "end") r.fail("expected 'end'");
}

inline RobotModel load_robot(const std::string& path) {
  std::ifstream in = open_input(path);
  TextReader r(in, path);
  check_format_header(r, "gcl-robot");
  RobotModel robot = read_robot(r);
  expect_end(r);
  return robot;
}

inline void write_disturbance(std::ostream& out, const DisturbanceParams& d) {
  const Eigen::Index n = d.dir_offset.size();
  out << "disturbance " << n << "\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    out << "  coupling_amp " << join_doubles(d.coupling_amp.row(i).transpose()) << "\n";
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out << "  coupling_phase " << join_doubles(d.coupling_phase.row(i).transpose()) << "\n";
  }
  out << "  dir_offset " << join_doubles(d.dir_offset) << "\n";
  out << "  dir_config_amp " << join_doubles(d.dir_config_amp) << "\n";
}

inline DisturbanceParams read_disturbance(TextReader& r) {
  const int n = static_cast<int>(detail::expect_numbers(r, "disturbance", 1)[0]);
  if (n < 1) r.fail("disturbance: need at least 1 joint");
  DisturbanceParams d = DisturbanceParams::zero(n);
  for (int i = 0; i < n; ++i) {
    d.coupling_amp.row(i) = detail::expect_numbers(r, "coupling_amp", n).transpose();
  }
  for (int i = 0; i < n; ++i) {
    d.coupling_phase.row(i) = detail::expect_numbers(r, "coupling_phase", n).transpose();
  }
  d.dir_offset = detail::expect_numbers(r, "dir_offset", n);
  d.dir_config_amp = detail::expect_numbers(r, "dir_config_amp", n);
  d.validate(n);
  return d;
}

}  // namespace gcl
