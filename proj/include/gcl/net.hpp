#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gcl/common.hpp"
#include "gcl/rng.hpp"

namespace gcl {

// Plain fully connected ReLU network. Layer l maps dims[l] -> dims[l+1];
// ReLU after every layer except the last.
struct MlpParams {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;   // biases[l]: dims[l+1]

  int num_layers() const { return static_cast<int>(weights.size()); }
  int in_dim() const { return layer_dims.front(); }
  int out_dim() const { return layer_dims.back(); }

  void validate() const {
    if (layer_dims.size() < 2) throw DimensionError("MlpParams: need at least 2 layer dims");
    if (weights.size() + 1 != layer_dims.size() || biases.size() != weights.size()) {
      throw DimensionError("MlpParams: layer count mismatch");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l] ||
          biases[l].size() != layer_dims[l + 1]) {
        throw DimensionError("MlpParams: bad shape at layer " + std::to_string(l));
      }
      if (!weights[l].allFinite() || !biases[l].allFinite()) {
        throw NumericError("MlpParams: non-finite parameter at layer " + std::to_string(l));
      }
    }
  }
};

// Gradient (or moment) container shaped like an MlpParams.
struct MlpGrads {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpGrads zero_like(const MlpParams& p) {
    MlpGrads g;
    g.weights.reserve(p.weights.size());
    g.biases.reserve(p.biases.size());
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      g.weights.push_back(Eigen::MatrixXd::Zero(p.weights[l].rows(), p.weights[l].cols()));
      g.biases.push_back(Eigen::VectorXd::Zero(p.biases[l].size()));
    }
    return g;
  }

  void add_scaled(const MlpGrads& other, double scale) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      weights[l] += scale * other.weights[l];
      biases[l] += scale * other.biases[l];
    }
  }
};

// Weights ~ N(0, 2/fan_in), biases 0. Row-major draw order keeps the result
// a pure function of the rng state.
inline MlpParams init_mlp(const std::vector<int>& layer_dims, Rng& rng) {
  if (layer_dims.size() < 2) throw DimensionError("init_mlp: need at least 2 layer dims");
  for (int d : layer_dims) {
    if (d < 1) throw DimensionError("init_mlp: layer dims must be >= 1");
  }
  MlpParams p;
  p.layer_dims = layer_dims;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.normal(0.0, std_dev);
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return p;
}

// Post-activation values per layer, one column per sample. acts[0] is the
// input batch; acts.back() is the network output (no activation applied).
struct ForwardCache {
  std::vector<Eigen::MatrixXd> acts;
};

inline Eigen::MatrixXd forward_batch(const MlpParams& p, const Eigen::MatrixXd& x,
                                     ForwardCache* cache = nullptr) {
  if (x.rows() != p.in_dim()) {
    throw DimensionError("forward_batch: input rows " + std::to_string(x.rows()) + ", expected " +
                         std::to_string(p.in_dim()));
  }
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(x);
  }
  Eigen::MatrixXd a = x;
  const int layers = p.num_layers();
  for (int l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = (p.weights[static_cast<std::size_t>(l)] * a).colwise() +
                        p.biases[static_cast<std::size_t>(l)];
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    a = std::move(z);
    if (cache) cache->acts.push_back(a);
  }
  return a;
}

inline Eigen::VectorXd forward(const MlpParams& p, const Eigen::VectorXd& x) {
  return forward_batch(p, x).col(0);
}

// Gradients of sum_b grad_out(:,b) . forward(p, x(:,b)) w.r.t. all parameters.
// ReLU subgradient at 0 is taken as 0; the post-activation mask encodes that.
inline MlpGrads backward_batch(const MlpParams& p, const ForwardCache& cache,
                               const Eigen::MatrixXd& grad_out) {
  const int layers = p.num_layers();
  if (static_cast<int>(cache.acts.size()) != layers + 1) {
    throw DimensionError("backward_batch: cache does not match network depth");
  }
  if (grad_out.rows() != p.out_dim() || grad_out.cols() != cache.acts[0].cols()) {
    throw DimensionError("backward_batch: grad_out shape mismatch");
  }
  MlpGrads g = MlpGrads::zero_like(p);
  Eigen::MatrixXd delta = grad_out;
  for (int l = layers - 1; l >= 0; --l) {
    const std::size_t li = static_cast<std::size_t>(l);
    if (l + 1 < layers) {
      delta = delta.cwiseProduct(
          (cache.acts[li + 1].array() > 0.0).cast<double>().matrix());
    }
    g.weights[li] = delta * cache.acts[li].transpose();
    g.biases[li] = delta.rowwise().sum();
    if (l > 0) delta = p.weights[li].transpose() * delta;
  }
  return g;
}

inline MlpGrads backward(const MlpParams& p, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& grad_out) {
  ForwardCache cache;
  forward_batch(p, x, &cache);
  return backward_batch(p, cache, grad_out);
}

struct AdamState {
  MlpGrads m, v;
  long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const MlpParams& p, double lr_ = 1e-3, double beta1_ = 0.9,
                              double beta2_ = 0.999, double eps_ = 1e-8) {
    AdamState s;
    s.m = MlpGrads::zero_like(p);
    s.v = MlpGrads::zero_like(p);
    s.lr = lr_;
    s.beta1 = beta1_;
    s.beta2 = beta2_;
    s.eps = eps_;
    return s;
  }
};

// Standard bias-corrected Adam update in place. Aborts on any non-finite
// parameter, which is how divergence surfaces to the training loop.
inline void adam_step(MlpParams& p, const MlpGrads& g, AdamState& s) {
  if (g.weights.size() != p.weights.size()) throw DimensionError("adam_step: gradient shape");
  s.t += 1;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    s.m.weights[l] = s.beta1 * s.m.weights[l] + (1.0 - s.beta1) * g.weights[l];
    s.v.weights[l] = s.beta2 * s.v.weights[l] + (1.0 - s.beta2) * g.weights[l].cwiseAbs2();
    p.weights[l] -= (s.lr * (s.m.weights[l] / c1).array() /
                     ((s.v.weights[l] / c2).cwiseSqrt().array() + s.eps))
                        .matrix();
    s.m.biases[l] = s.beta1 * s.m.biases[l] + (1.0 - s.beta1) * g.biases[l];
    s.v.biases[l] = s.beta2 * s.v.biases[l] + (1.0 - s.beta2) * g.biases[l].cwiseAbs2();
    p.biases[l] -= (s.lr * (s.m.biases[l] / c1).array() /
                    ((s.v.biases[l] / c2).cwiseSqrt().array() + s.eps))
                       .matrix();
    if (!p.weights[l].allFinite() || !p.biases[l].allFinite()) {
      throw TrainingDiverged("adam_step: non-finite parameter after update at step " +
                             std::to_string(s.t));
    }
  }
}

// coeff * sum of squared weights, biases excluded. The gradient contribution
// is 2*coeff*w per weight and zero for every bias.
inline std::pair<double, MlpGrads> l2_penalty(const MlpParams& p, double coeff) {
  if (coeff < 0.0) throw ConfigError("l2_penalty: coeff must be >= 0");
  MlpGrads g = MlpGrads::zero_like(p);
  double value = 0.0;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    value += coeff * p.weights[l].squaredNorm();
    g.weights[l] = 2.0 * coeff * p.weights[l];
  }
  return {value, std::move(g)};
}

}  // namespace gcl
