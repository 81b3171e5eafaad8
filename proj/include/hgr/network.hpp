#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "hgr/nn.hpp"
#include "hgr/rng.hpp"
#include "hgr/tensor.hpp"

namespace hgr {

// Per-parameter-layer gradients; tensors/vectors are empty for layers
// without parameters, mirroring Network::weights / Network::biases.
template <typename Scalar>
struct Gradients {
  std::vector<Tensor<Scalar>> weights;
  std::vector<VecX<Scalar>> biases;

  void set_zero() {
    for (auto& w : weights)
      if (!w.empty()) w.set_zero();
    for (auto& b : biases) b.setZero();
  }
};

// Cached activations of one forward pass, consumed by Network::backward.
// activations[i] is the input of layer i; activations.back() is the final
// output (class probabilities when the net ends in softmax).
template <typename Scalar>
struct ForwardTrace {
  std::vector<Tensor<Scalar>> activations;
  std::vector<std::vector<Index>> pool_argmax;  // one entry per maxpool layer

  const Tensor<Scalar>& output() const { return activations.back(); }
  bool valid() const { return !activations.empty(); }
};

template <typename Scalar>
class Network {
 public:
  std::vector<LayerSpec> layers;
  std::vector<Tensor<Scalar>> weights;  // parallel to layers; empty if no params
  std::vector<VecX<Scalar>> biases;

  void add(const LayerSpec& spec) {
    layers.push_back(spec);
    switch (spec.kind) {
      case LayerKind::Conv:
        weights.emplace_back(spec.kernel_h, spec.kernel_w, spec.in_channels,
                             spec.kernel_count);
        biases.emplace_back(VecX<Scalar>::Zero(spec.kernel_count));
        break;
      case LayerKind::FullyConnected:
        weights.emplace_back(Index{1}, Index{1}, spec.in_features, spec.out_features);
        biases.emplace_back(VecX<Scalar>::Zero(spec.out_features));
        break;
      default:
        weights.emplace_back();
        biases.emplace_back();
        break;
    }
  }

  bool has_params(std::size_t layer) const { return !weights[layer].empty(); }

  Index weight_count() const {
    Index n = 0;
    for (const auto& w : weights) n += w.size();
    return n;
  }
  Index bias_count() const {
    Index n = 0;
    for (const auto& b : biases) n += b.size();
    return n;
  }

  // Shape trace through all layers for a given input shape (h, w, c).
  std::vector<std::array<Index, 3>> shape_trace(std::array<Index, 3> in) const {
    std::vector<std::array<Index, 3>> trace{in};
    for (const auto& spec : layers) {
      in = layer_output_shape(spec, in);
      trace.push_back(in);
    }
    return trace;
  }

  ForwardTrace<Scalar> forward_trace(const Tensor<Scalar>& input) const {
    ForwardTrace<Scalar> t;
    t.activations.reserve(layers.size() + 1);
    t.activations.push_back(input);
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& spec = layers[i];
      const Tensor<Scalar>& x = t.activations.back();
      switch (spec.kind) {
        case LayerKind::Conv:
          t.activations.push_back(conv2d_forward(x, weights[i], biases[i]));
          break;
        case LayerKind::MaxPool: {
          t.pool_argmax.emplace_back();
          t.activations.push_back(
              maxpool_forward(x, spec.window, spec.stride, &t.pool_argmax.back()));
          break;
        }
        case LayerKind::FullyConnected:
          t.activations.push_back(fc_forward(x, weights[i], biases[i]));
          break;
        case LayerKind::Relu:
          t.activations.push_back(relu_forward(x));
          break;
        case LayerKind::Softmax: {
          Tensor<Scalar> out = x;
          for (Index n = 0; n < x.count(); ++n) {
            VecX<Scalar> p = softmax(VecX<Scalar>(x.slice_vec(n)));
            out.slice_vec(n) = p;
          }
          t.activations.push_back(std::move(out));
          break;
        }
      }
    }
    return t;
  }

  // Class probabilities for a batch; the returned tensor is (1, 1, classes, batch).
  Tensor<Scalar> forward(const Tensor<Scalar>& input) const {
    return forward_trace(input).output();
  }

  Gradients<Scalar> zero_gradients() const {
    Gradients<Scalar> g;
    g.weights.reserve(weights.size());
    g.biases.reserve(biases.size());
    for (const auto& w : weights)
      g.weights.push_back(w.empty() ? Tensor<Scalar>() : Tensor<Scalar>(w.shape()[0], w.shape()[1], w.shape()[2], w.shape()[3]));
    for (const auto& b : biases) g.biases.push_back(VecX<Scalar>::Zero(b.size()));
    return g;
  }

  // Cross-entropy loss gradients for every parameter, accumulated into `grads`
  // (summed over the batch). The network must end in a softmax layer and the
  // trace must come from forward_trace on this network. Returns the summed loss.
  Scalar backward(const ForwardTrace<Scalar>& trace, const std::vector<Index>& labels,
                  Gradients<Scalar>& grads) const {
    require(trace.valid() && trace.activations.size() == layers.size() + 1,
            "backward: called without a matching cached forward trace");
    require(!layers.empty() && layers.back().kind == LayerKind::Softmax,
            "backward: network must end in softmax");
    const Tensor<Scalar>& probs = trace.activations.back();
    require(static_cast<Index>(labels.size()) == probs.count(),
            "backward: label count != batch size");

    // Combined softmax + cross-entropy head: dLogits = p - onehot(label).
    Scalar loss = 0;
    Tensor<Scalar> grad = probs;
    for (Index n = 0; n < probs.count(); ++n) {
      const Index label = labels[static_cast<std::size_t>(n)];
      require(label >= 0 && label < probs.slice_size(), "backward: label out of range");
      loss -= std::log(std::max(probs.slice_vec(n)[label],
                                std::numeric_limits<Scalar>::min()));
      grad.slice_vec(n)[label] -= Scalar(1);
    }

    std::size_t pool_i = trace.pool_argmax.size();
    for (std::size_t i = layers.size(); i-- > 0;) {
      const auto& spec = layers[i];
      const Tensor<Scalar>& x = trace.activations[i];
      switch (spec.kind) {
        case LayerKind::Softmax:
          break;  // folded into the cross-entropy head above
        case LayerKind::Relu:
          grad = relu_backward(x, grad);
          break;
        case LayerKind::MaxPool:
          --pool_i;
          grad = maxpool_backward(x.shape(), trace.pool_argmax[pool_i], grad);
          break;
        case LayerKind::Conv: {
          Tensor<Scalar> gi;
          Tensor<Scalar>* gi_ptr = nullptr;
          if (i > 0) {
            gi = Tensor<Scalar>(x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]);
            gi_ptr = &gi;
          }
          conv2d_backward(x, weights[i], grad, gi_ptr, grads.weights[i], grads.biases[i]);
          if (gi_ptr != nullptr) grad = std::move(gi);
          break;
        }
        case LayerKind::FullyConnected: {
          Tensor<Scalar> gi(x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]);
          fc_backward(x, weights[i], grad, i > 0 ? &gi : nullptr, grads.weights[i],
                      grads.biases[i]);
          if (i > 0) grad = std::move(gi);
          break;
        }
      }
    }
    return loss;
  }
};

// The paper's gesture classifier: 50x50 binary mask in, 10 class
// probabilities out.
//   50x50x1 -> conv 50@5x5 -> 46x46x50 -> pool 2/2 -> 23x23x50
//            -> conv 20@3x3 -> 21x21x20 -> pool 3/3 -> 7x7x20
//            -> fc 50 -> fc 10 -> softmax
template <typename Scalar>
Network<Scalar> canonical_gesture_network() {
  Network<Scalar> net;
  net.add(LayerSpec::conv(50, 5, 5, 1));
  net.add(LayerSpec::relu());
  net.add(LayerSpec::maxpool(2, 2));
  net.add(LayerSpec::conv(20, 3, 3, 50));
  net.add(LayerSpec::relu());
  net.add(LayerSpec::maxpool(3, 3));
  net.add(LayerSpec::fully_connected(980, 50));
  net.add(LayerSpec::relu());
  net.add(LayerSpec::fully_connected(50, 10));
  net.add(LayerSpec::softmax());
  net.shape_trace({50, 50, 1});  // throws if the stack is inconsistent
  return net;
}

// Per-tensor fan-in / fan-out used by Xavier bounds. For convolutions the
// receptive field multiplies both; for dense layers they are the feature counts.
inline std::pair<Index, Index> fan_in_out(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::Conv:
      return {spec.kernel_h * spec.kernel_w * spec.in_channels,
              spec.kernel_h * spec.kernel_w * spec.kernel_count};
    case LayerKind::FullyConnected:
      return {spec.in_features, spec.out_features};
    default:
      return {0, 0};
  }
}

// Uniform Xavier initialization: weights in +-sqrt(6 / (fan_in + fan_out)),
// biases zero. Deterministic for a given seed.
template <typename Scalar>
void xavier_init(Network<Scalar>& net, Rng& rng) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.has_params(i)) continue;
    const auto [fan_in, fan_out] = fan_in_out(net.layers[i]);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    auto v = net.weights[i].vec();
    for (Index j = 0; j < v.size(); ++j)
      v[j] = static_cast<Scalar>(rng.uniform(-bound, bound));
    net.biases[i].setZero();
  }
}

// Momentum buffers for SGD; one entry per layer, shaped like the parameters.
template <typename Scalar>
struct SgdState {
  std::vector<Tensor<Scalar>> weight_velocity;
  std::vector<VecX<Scalar>> bias_velocity;

  explicit SgdState(const Network<Scalar>& net) {
    for (const auto& w : net.weights)
      weight_velocity.push_back(w.empty() ? Tensor<Scalar>()
                                          : Tensor<Scalar>(w.shape()[0], w.shape()[1],
                                                           w.shape()[2], w.shape()[3]));
    for (const auto& b : net.biases) bias_velocity.push_back(VecX<Scalar>::Zero(b.size()));
  }
};

// v <- momentum * v - lr * g;  w <- w + v
template <typename Scalar>
void sgd_step(Network<Scalar>& net, const Gradients<Scalar>& grads, SgdState<Scalar>& state,
              Scalar lr, Scalar momentum) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.has_params(i)) continue;
    require(net.weights[i].same_shape(grads.weights[i]) &&
                net.biases[i].size() == grads.biases[i].size(),
            "sgd_step: gradient shape mismatch");
    auto& vw = state.weight_velocity[i];
    vw.vec() = momentum * vw.vec() - lr * grads.weights[i].vec();
    net.weights[i].vec() += vw.vec();
    auto& vb = state.bias_velocity[i];
    vb = momentum * vb - lr * grads.biases[i];
    net.biases[i] += vb;
  }
}

}  // namespace hgr
