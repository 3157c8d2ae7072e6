#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/features.hpp"
#include "gcl/net.hpp"
#include "gcl/plant.hpp"
#include "gcl/robot.hpp"
#include "gcl/robot_io.hpp"
#include "gcl/textio.hpp"

namespace gcl {

// Trained dual-network compensation model: one net per motion direction plus
// the normalization fitted at training time and enough robot metadata to
// rebuild the input encoding.
struct CompensationModel {
  std::string robot_name;
  std::vector<JointKind> kinds;
  MlpParams w_plus;
  MlpParams w_minus;
  NormParams norm;

  int joints() const { return static_cast<int>(kinds.size()); }

  void validate() const {
    w_plus.validate();
    w_minus.validate();
    norm.validate();
    if (w_plus.layer_dims != w_minus.layer_dims) {
      throw DimensionError("CompensationModel: direction nets disagree on layer dims");
    }
    if (kinds.empty()) throw DimensionError("CompensationModel: no joints");
    if (w_plus.in_dim() != encoded_dim(kinds) || norm.mu_in.size() != w_plus.in_dim() ||
        w_plus.out_dim() != joints() || norm.mu_out.size() != joints()) {
      throw DimensionError("CompensationModel: net/norm/joint dimensions inconsistent");
    }
  }
};

// Normalized-space prediction for an already encoded input. The direction
// mask picks one net per joint.
inline Eigen::VectorXd predict_normalized(const CompensationModel& m, const Eigen::VectorXd& nz,
                                          const JointVector& dq) {
  require_dim(nz, m.w_plus.in_dim(), "predict_normalized: nz");
  require_dim(dq, m.joints(), "predict_normalized: dq");
  const Eigen::VectorXd p = forward(m.w_plus, nz);
  const Eigen::VectorXd q = forward(m.w_minus, nz);
  const JointVector u = step_mask(dq);
  return p.cwiseProduct(u) + q.cwiseProduct(JointVector::Ones(u.size()) - u);
}

inline JointVector predict_from_encoded(const CompensationModel& m, const Eigen::VectorXd& x1,
                                        const JointVector& dq) {
  const Eigen::VectorXd nz = normalize(x1, m.norm.mu_in, m.norm.sigma_in);
  return denormalize(predict_normalized(m, nz, dq), m.norm.mu_out, m.norm.sigma_out);
}

inline JointVector predict_compensation(const CompensationModel& m, const JointVector& q,
                                        const JointVector& dq) {
  require_dim(q, m.joints(), "predict_compensation: q");
  return predict_from_encoded(m, trig_encode(q, m.kinds), dq);
}

namespace detail {

inline void write_mlp(std::ostream& out, const MlpParams& p) {
  for (int l = 0; l < p.num_layers(); ++l) {
    const Eigen::MatrixXd& w = p.weights[static_cast<std::size_t>(l)];
    out << "layer " << (l + 1) << " " << w.rows() << " " << w.cols() << "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      out << join_doubles(w.row(r).transpose()) << "\n";
    }
    out << "bias " << join_doubles(p.biases[static_cast<std::size_t>(l)]) << "\n";
  }
}

inline MlpParams read_mlp(TextReader& r, const std::vector<int>& dims) {
  MlpParams p;
  p.layer_dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto head = r.require_line("layer");
    if (head.size() != 4 || head[0] != "layer") r.fail("expected 'layer <i> <rows> <cols>'");
    const long rows = parse_long(head[2], "layer rows");
    const long cols = parse_long(head[3], "layer cols");
    if (parse_long(head[1], "layer index") != static_cast<long>(l + 1) || rows != dims[l + 1] ||
        cols != dims[l]) {
      r.fail("layer header disagrees with dims");
    }
    Eigen::MatrixXd w(rows, cols);
    for (long row = 0; row < rows; ++row) {
      const auto tokens = r.require_line("weight row");
      if (static_cast<long>(tokens.size()) != cols) r.fail("weight row width mismatch");
      for (long c = 0; c < cols; ++c) {
        w(row, c) = parse_double(tokens[static_cast<std::size_t>(c)], "weight");
      }
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(parse_numbers(r, r.require_line("bias"), "bias", static_cast<int>(rows)));
  }
  p.validate();
  return p;
}

}  // namespace detail

inline void save_model(const std::string& path, const CompensationModel& m) {
  m.validate();
  std::ofstream out = open_output(path);
  out << "gcl-model v1\n";
  out << "robot " << m.robot_name << "\n";
  out << "kinds ";
  for (JointKind k : m.kinds) out << (k == JointKind::Revolute ? 'R' : 'P');
  out << "\n";
  out << "dims " << m.w_plus.layer_dims.size();
  for (int d : m.w_plus.layer_dims) out << " " << d;
  out << "\n";
  out << "mu_in " << join_doubles(m.norm.mu_in) << "\n";
  out << "sigma_in " << join_doubles(m.norm.sigma_in) << "\n";
  out << "mu_out " << join_doubles(m.norm.mu_out) << "\n";
  out << "sigma_out " << join_doubles(m.norm.sigma_out) << "\n";
  out << "net plus\n";
  detail::write_mlp(out, m.w_plus);
  out << "net minus\n";
  detail::write_mlp(out, m.w_minus);
  out << "end\n";
  if (!out) throw CorruptFileError("save_model: write failed for " + path);
}

inline CompensationModel load_model(const std::string& path) {
  std::ifstream in = open_input(path);
  TextReader r(in, path);
  {
    const auto tokens = r.require_line("format header");
    if (tokens.size() != 2 || tokens[0] != "gcl-model") {
      throw VersionError(path + ": not a gcl-model file");
    }
    if (tokens[1] != "v1") {
      throw VersionError(path + ": unsupported gcl-model version '" + tokens[1] + "'");
    }
  }
  CompensationModel m;
  {
    const auto tokens = r.require_line("robot");
    if (tokens.size() != 2 || tokens[0] != "robot") r.fail("expected 'robot <name>'");
    m.robot_name = tokens[1];
  }
  {
    const auto tokens = r.require_line("kinds");
    if (tokens.size() != 2 || tokens[0] != "kinds") r.fail("expected 'kinds <RP string>'");
    for (char c : tokens[1]) {
      if (c == 'R') {
        m.kinds.push_back(JointKind::Revolute);
      } else if (c == 'P') {
        m.kinds.push_back(JointKind::Prismatic);
      } else {
        r.fail(std::string("bad joint kind character '") + c + "'");
      }
    }
  }
  std::vector<int> dims;
  {
    const auto tokens = r.require_line("dims");
    if (tokens.size() < 4 || tokens[0] != "dims") r.fail("expected 'dims <count> <d0> <d1> ...'");
    const long count = parse_long(tokens[1], "dims count");
    if (static_cast<long>(tokens.size()) != count + 2) r.fail("dims count mismatch");
    for (long i = 0; i < count; ++i) {
      dims.push_back(static_cast<int>(parse_long(tokens[static_cast<std::size_t>(i + 2)], "dim")));
    }
  }
  const int in_dim = dims.front();
  const int out_dim = dims.back();
  m.norm.mu_in = detail::expect_numbers(r, "mu_in", in_dim);
  m.norm.sigma_in = detail::expect_numbers(r, "sigma_in", in_dim);
  m.norm.mu_out = detail::expect_numbers(r, "mu_out", out_dim);
  m.norm.sigma_out = detail::expect_numbers(r, "sigma_out", out_dim);
  {
    const auto tokens = r.require_line("net plus");
    if (tokens.size() != 2 || tokens[0] != "net" || tokens[1] != "plus") r.fail("expected 'net plus'");
  }
  m.w_plus = detail::read_mlp(r, dims);
  {
    const auto tokens = r.require_line("net minus");
    if (tokens.size() != 2 || tokens[0] != "net" || tokens[1] != "minus") {
      r.fail("expected 'net minus'");
    }
  }
  m.w_minus = detail::read_mlp(r, dims);
  expect_end(r);
  m.validate();
  return m;
}

}  // namespace gcl
