#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "segmeld/error.hpp"
#include "segmeld/random.hpp"

namespace segmeld {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weights;  // out x in
  Vector<Scalar> bias;     // out
};

/// Fully connected encoder: tanh on every hidden layer, a linear last layer,
/// then L2 normalisation onto the unit sphere.
///
/// The same type carries parameter gradients (see NetGradient), so updates
/// are plain expressions over matching layers.
template <typename Scalar>
class EmbeddingNet {
 public:
  EmbeddingNet() = default;

  /// InvalidArgument unless the layer shapes chain.
  explicit EmbeddingNet(std::vector<DenseLayer<Scalar>> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw Error(ErrorCode::InvalidArgument, "EmbeddingNet needs at least one layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& L = layers_[l];
      if (L.weights.rows() != L.bias.size() || L.weights.rows() < 1 || L.weights.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(l) + " weight/bias shapes disagree");
      }
      if (l > 0 && L.weights.cols() != layers_[l - 1].weights.rows()) {
        throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(l) + " input does not chain");
      }
    }
  }

  /// dims = {input, hidden..., output}. Weights uniform in
  /// +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static EmbeddingNet glorot(std::span<const int> dims, std::uint64_t seed) {
    if (dims.size() < 2) throw Error(ErrorCode::InvalidArgument, "need input and output dimensions");
    Rng rng(seed);
    std::vector<DenseLayer<Scalar>> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      const int in = dims[l], out = dims[l + 1];
      if (in < 1 || out < 1) throw Error(ErrorCode::InvalidArgument, "layer dimensions must be >= 1");
      const double limit = std::sqrt(6.0 / (in + out));
      DenseLayer<Scalar> layer{Matrix<Scalar>(out, in), Vector<Scalar>::Zero(out)};
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
        layer.weights.data()[i] = static_cast<Scalar>(uniform_real(rng, -limit, limit));
      }
      layers.push_back(std::move(layer));
    }
    return EmbeddingNet(std::move(layers));
  }

  static EmbeddingNet zeros_like(const EmbeddingNet& other) {
    EmbeddingNet out = other;
    for (auto& L : out.layers_) {
      L.weights.setZero();
      L.bias.setZero();
    }
    return out;
  }

  int input_dim() const { return static_cast<int>(layers_.front().weights.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().weights.rows()); }
  std::size_t depth() const { return layers_.size(); }

  const std::vector<DenseLayer<Scalar>>& layers() const { return layers_; }
  std::vector<DenseLayer<Scalar>>& layers() { return layers_; }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& L : layers_) n += L.weights.size() + L.bias.size();
    return n;
  }

  /// Parameters in layer order, each layer's weights (column-major) then bias.
  Vector<Scalar> flatten() const {
    Vector<Scalar> out(parameter_count());
    Eigen::Index k = 0;
    for (const auto& L : layers_) {
      out.segment(k, L.weights.size()) = L.weights.reshaped();
      k += L.weights.size();
      out.segment(k, L.bias.size()) = L.bias;
      k += L.bias.size();
    }
    return out;
  }

  void assign(const Vector<Scalar>& flat) {
    if (flat.size() != parameter_count()) throw Error(ErrorCode::DimensionMismatch, "flat parameter length");
    Eigen::Index k = 0;
    for (auto& L : layers_) {
      L.weights.reshaped() = flat.segment(k, L.weights.size());
      k += L.weights.size();
      L.bias = flat.segment(k, L.bias.size());
      k += L.bias.size();
    }
  }

  bool all_finite() const {
    for (const auto& L : layers_) {
      if (!L.weights.allFinite() || !L.bias.allFinite()) return false;
    }
    return true;
  }

  EmbeddingNet& operator+=(const EmbeddingNet& rhs) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].weights += rhs.layers_[l].weights;
      layers_[l].bias += rhs.layers_[l].bias;
    }
    return *this;
  }

  EmbeddingNet& operator*=(Scalar s) {
    for (auto& L : layers_) {
      L.weights *= s;
      L.bias *= s;
    }
    return *this;
  }

  /// this += s * rhs
  void add_scaled(Scalar s, const EmbeddingNet& rhs) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].weights += s * rhs.layers_[l].weights;
      layers_[l].bias += s * rhs.layers_[l].bias;
    }
  }

  bool operator==(const EmbeddingNet& rhs) const {
    if (layers_.size() != rhs.layers_.size()) return false;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& a = layers_[l];
      const auto& b = rhs.layers_[l];
      if (a.weights.rows() != b.weights.rows() || a.weights.cols() != b.weights.cols()) return false;
      if (a.weights != b.weights || a.bias != b.bias) return false;
    }
    return true;
  }

 private:
  std::vector<DenseLayer<Scalar>> layers_;
};

/// Parameter gradients share the network's layer layout.
template <typename Scalar>
using NetGradient = EmbeddingNet<Scalar>;

/// Intermediate values of one forward pass, kept for backpropagation.
template <typename Scalar>
struct ForwardTrace {
  std::vector<Vector<Scalar>> inputs;  // input to each layer
  Vector<Scalar> pre_norm;
  Vector<Scalar> output;
  bool degenerate = false;  // pre_norm was zero; output is e1
};

template <typename Scalar>
ForwardTrace<Scalar> forward_trace(const EmbeddingNet<Scalar>& net, const Vector<Scalar>& x) {
  if (x.size() != net.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "input has " + std::to_string(x.size()) + " entries, net expects " + std::to_string(net.input_dim()));
  }
  ForwardTrace<Scalar> t;
  const auto& layers = net.layers();
  t.inputs.reserve(layers.size());
  t.inputs.push_back(x);
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    t.inputs.push_back((layers[l].weights * t.inputs.back() + layers[l].bias).array().tanh().matrix());
  }
  t.pre_norm = layers.back().weights * t.inputs.back() + layers.back().bias;
  const Scalar norm = t.pre_norm.norm();
  if (norm == Scalar(0)) {
    t.degenerate = true;
    t.output = Vector<Scalar>::Unit(t.pre_norm.size(), 0);
  } else {
    t.output = t.pre_norm / norm;
  }
  return t;
}

/// Unit-norm embedding of x. A zero pre-normalisation vector maps to e1.
template <typename Scalar>
Vector<Scalar> forward(const EmbeddingNet<Scalar>& net, const Vector<Scalar>& x) {
  return forward_trace(net, x).output;
}

/// Accumulates d(loss)/d(parameters) into `grad` given d(loss)/d(output).
/// The e1 fallback contributes nothing.
template <typename Scalar>
void backward(const EmbeddingNet<Scalar>& net, const ForwardTrace<Scalar>& trace, const Vector<Scalar>& grad_output,
              NetGradient<Scalar>& grad) {
  if (trace.degenerate) return;
  const auto& layers = net.layers();
  auto& acc = grad.layers();
  const Scalar norm = trace.pre_norm.norm();
  const Vector<Scalar>& y = trace.output;
  Vector<Scalar> g = (grad_output - y * y.dot(grad_output)) / norm;
  for (std::size_t l = layers.size(); l-- > 0;) {
    acc[l].weights.noalias() += g * trace.inputs[l].transpose();
    acc[l].bias += g;
    if (l == 0) break;
    const Vector<Scalar>& a = trace.inputs[l];
    g = ((layers[l].weights.transpose() * g).array() * (Scalar(1) - a.array().square())).matrix();
  }
}

}  // namespace segmeld
