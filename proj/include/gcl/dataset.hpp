#pragma once

#include <string>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/textio.hpp"

namespace gcl {

// One training record. x1 is the trigonometric encoding of the measured
// position (length n+k), x2 the commanded position change, y the torque that
// held the arm static there.
struct Sample {
  Eigen::VectorXd x1;
  JointVector x2;
  JointVector y;
};

enum class Provenance { system, teacher, joint };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::system: return "system";
    case Provenance::teacher: return "teacher";
    case Provenance::joint: return "joint";
  }
  return "?";
}

struct Dataset {
  int in_dim = 0;
  int joints = 0;
  Provenance provenance = Provenance::system;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  void append(Sample s) {
    require_dim(s.x1, in_dim, "Dataset::append: x1");
    require_dim(s.x2, joints, "Dataset::append: x2");
    require_dim(s.y, joints, "Dataset::append: y");
    samples.push_back(std::move(s));
  }
};

// Column-per-sample layout used by the batch forward/backward passes.
struct DatasetMatrices {
  Eigen::MatrixXd x1;  // in_dim x N
  Eigen::MatrixXd x2;  // joints x N
  Eigen::MatrixXd y;   // joints x N
};

inline DatasetMatrices to_matrices(const Dataset& d) {
  const Eigen::Index count = static_cast<Eigen::Index>(d.size());
  DatasetMatrices m;
  m.x1.resize(d.in_dim, count);
  m.x2.resize(d.joints, count);
  m.y.resize(d.joints, count);
  for (Eigen::Index c = 0; c < count; ++c) {
    m.x1.col(c) = d.samples[static_cast<std::size_t>(c)].x1;
    m.x2.col(c) = d.samples[static_cast<std::size_t>(c)].x2;
    m.y.col(c) = d.samples[static_cast<std::size_t>(c)].y;
  }
  return m;
}

inline Dataset merge(const Dataset& a, const Dataset& b) {
  if (a.in_dim != b.in_dim || a.joints != b.joints) {
    throw DimensionError("merge: datasets disagree on dimensions");
  }
  Dataset out = a;
  out.provenance = Provenance::joint;
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

inline void save_dataset(const std::string& path, const Dataset& d) {
  std::ofstream out = open_output(path);
  std::vector<std::string> header;
  for (int i = 0; i < d.in_dim; ++i) header.push_back("x1_" + std::to_string(i));
  for (int i = 0; i < d.joints; ++i) header.push_back("x2_" + std::to_string(i));
  for (int i = 0; i < d.joints; ++i) header.push_back("y_" + std::to_string(i));
  write_csv_row(out, header);
  std::vector<std::string> row(header.size());
  for (const Sample& s : d.samples) {
    std::size_t c = 0;
    for (int i = 0; i < d.in_dim; ++i) row[c++] = format_double(s.x1[i]);
    for (int i = 0; i < d.joints; ++i) row[c++] = format_double(s.x2[i]);
    for (int i = 0; i < d.joints; ++i) row[c++] = format_double(s.y[i]);
    write_csv_row(out, row);
  }
  if (!out) throw CorruptFileError("save_dataset: write failed for " + path);
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw CorruptFileError(path + ": empty dataset file");
  const std::vector<std::string> header = split_csv_row(line);

  int in_dim = 0;
  int joints = 0;
  {
    std::size_t c = 0;
    while (c < header.size() && header[c] == "x1_" + std::to_string(in_dim)) ++c, ++in_dim;
    while (c < header.size() && header[c] == "x2_" + std::to_string(joints)) ++c, ++joints;
    int y_cols = 0;
    while (c < header.size() && header[c] == "y_" + std::to_string(y_cols)) ++c, ++y_cols;
    if (c != header.size() || in_dim < 1 || joints < 1 || y_cols != joints) {
      throw CorruptFileError(path + ": header must be x1_0..x1_{m-1}, x2_0..x2_{n-1}, y_0..y_{n-1}");
    }
  }

  Dataset d;
  d.in_dim = in_dim;
  d.joints = joints;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_row(line);
    if (cells.size() != header.size()) {
      throw CorruptFileError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
    }
    Sample s;
    s.x1.resize(in_dim);
    s.x2.resize(joints);
    s.y.resize(joints);
    const std::string where = path + ":" + std::to_string(line_no);
    std::size_t c = 0;
    for (int i = 0; i < in_dim; ++i) s.x1[i] = parse_double(cells[c++], where);
    for (int i = 0; i < joints; ++i) s.x2[i] = parse_double(cells[c++], where);
    for (int i = 0; i < joints; ++i) s.y[i] = parse_double(cells[c++], where);
    d.samples.push_back(std::move(s));
  }
  return d;
}

}  // namespace gcl
