#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "hgr/network.hpp"
#include "hgr/nn.hpp"
#include "hgr/tensor.hpp"

namespace hgr {

// MSB-first sign packing, one bit per weight; bit = 1 <=> +1.
inline std::vector<std::uint8_t> pack_bits(const std::vector<std::int8_t>& signs) {
  require(!signs.empty(), "pack_bits: empty sign vector");
  std::vector<std::uint8_t> bytes((signs.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < signs.size(); ++i)
    if (signs[i] > 0) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return bytes;
}

inline std::vector<std::int8_t> unpack_bits(const std::vector<std::uint8_t>& bytes,
                                            Index n) {
  require(n >= 1, "unpack_bits: n must be >= 1");
  require(static_cast<Index>(bytes.size()) == (n + 7) / 8,
          "unpack_bits: byte length inconsistent with n");
  std::vector<std::int8_t> signs(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    signs[static_cast<std::size_t>(i)] =
        (bytes[static_cast<std::size_t>(i / 8)] & (0x80u >> (i % 8))) ? 1 : -1;
  return signs;
}

// One binarized kernel: packed signs plus its scale. Covers both convolution
// kernels and fully connected neurons (a neuron is a kernel whose size equals
// its input).
struct BinarizedKernel {
  Index n = 0;
  std::vector<std::uint8_t> bits;  // ceil(n/8) bytes, MSB-first
  float scale = 0.f;

  Index packed_bytes() const { return (n + 7) / 8; }

  int sign_at(Index i) const {
    return (bits[static_cast<std::size_t>(i / 8)] & (0x80u >> (i % 8))) ? 1 : -1;
  }

  std::vector<std::int8_t> signs() const { return unpack_bits(bits, n); }

  // Sign-flip masks for the branchless add/subtract accumulation:
  // 0x80000000 where the weight is -1, 0 where it is +1.
  std::vector<std::uint32_t> sign_masks() const {
    std::vector<std::uint32_t> m(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
      m[static_cast<std::size_t>(i)] = sign_at(i) < 0 ? 0x80000000u : 0u;
    return m;
  }
};

// scale = mean absolute value, sign(0) = +1. Minimizes ||W - alpha*B||^2 over
// B in {+-1}^n and real alpha.
template <typename Scalar>
BinarizedKernel binarize_kernel(const Scalar* w, Index n) {
  require(n >= 1, "binarize_kernel: empty kernel");
  std::vector<std::int8_t> signs(static_cast<std::size_t>(n));
  long double abs_sum = 0;
  for (Index i = 0; i < n; ++i) {
    const Scalar v = w[i];
    signs[static_cast<std::size_t>(i)] = v >= Scalar(0) ? 1 : -1;
    abs_sum += std::abs(static_cast<long double>(v));
  }
  BinarizedKernel k;
  k.n = n;
  k.bits = pack_bits(signs);
  k.scale = static_cast<float>(abs_sum / static_cast<long double>(n));
  return k;
}

template <typename Scalar>
BinarizedKernel binarize_kernel(const VecX<Scalar>& w) {
  return binarize_kernel(w.data(), w.size());
}

// J(B, alpha) = sum_i (w_i - alpha * b_i)^2
template <typename Scalar>
Scalar binarization_objective(const VecX<Scalar>& w, Scalar alpha,
                              const std::vector<std::int8_t>& signs) {
  require(w.size() == static_cast<Index>(signs.size()),
          "binarization_objective: length mismatch");
  Scalar j = 0;
  for (Index i = 0; i < w.size(); ++i) {
    const Scalar d = w[i] - alpha * static_cast<Scalar>(signs[static_cast<std::size_t>(i)]);
    j += d * d;
  }
  return j;
}

// Materializes alpha * B with the same layout as the source kernel.
template <typename Scalar>
void materialize_kernel(const BinarizedKernel& k, Scalar* out) {
  const auto signs = k.signs();
  for (Index i = 0; i < k.n; ++i)
    out[i] = static_cast<Scalar>(k.scale) * static_cast<Scalar>(signs[static_cast<std::size_t>(i)]);
}

namespace detail {

// Accumulates sum(+bits) - sum(-bits) over a contiguous patch using sign-bit
// flips and additions only; the single multiplication is the final scale.
inline float signed_patch_sum(const float* patch, const std::uint32_t* masks, Index n) {
  float acc = 0.f;
  for (Index i = 0; i < n; ++i) {
    std::uint32_t u;
    std::memcpy(&u, patch + i, sizeof(u));
    u ^= masks[i];
    float v;
    std::memcpy(&v, &u, sizeof(v));
    acc += v;
  }
  return acc;
}

}  // namespace detail

// Add/subtract convolution over a whole layer of binarized kernels. Each
// window patch is gathered once and reused for every kernel; the accumulation
// uses only additions and subtractions (sign-bit flips), and the per-window
// result is scaled by its kernel's alpha once. Output layout matches
// conv2d_forward: (h-kh+1, w-kw+1, kernel_count, batch).
inline Tensor<float> binarized_conv_layer_forward(const Tensor<float>& input,
                                                  const std::vector<BinarizedKernel>& kernels,
                                                  Index kh, Index kw,
                                                  const VecX<float>& biases) {
  require(!kernels.empty(), "binarized_conv_layer_forward: no kernels");
  const Index c = input.channels();
  for (const auto& k : kernels)
    require(kh * kw * c == k.n,
            "binarized_conv_layer_forward: kernel size " + std::to_string(k.n) +
                " does not match " + std::to_string(kh) + "x" + std::to_string(kw) + "x" +
                std::to_string(c));
  require(input.height() >= kh && input.width() >= kw,
          "binarized_conv_layer_forward: input smaller than kernel");
  require(biases.size() == static_cast<Index>(kernels.size()),
          "binarized_conv_layer_forward: bias count mismatch");

  const Index oh = input.height() - kh + 1;
  const Index ow = input.width() - kw + 1;
  const Index kn = static_cast<Index>(kernels.size());
  const Index patch_len = kh * kw * c;

  std::vector<std::vector<std::uint32_t>> masks;
  masks.reserve(kernels.size());
  for (const auto& k : kernels) masks.push_back(k.sign_masks());

  Tensor<float> out(oh, ow, kn, input.count());
  std::vector<float> patch(static_cast<std::size_t>(patch_len));
  for (Index n = 0; n < input.count(); ++n) {
    const float* in = input.slice(n);
    float* o = out.slice(n);
    for (Index oy = 0; oy < oh; ++oy)
      for (Index ox = 0; ox < ow; ++ox) {
        for (Index dy = 0; dy < kh; ++dy)
          std::memcpy(patch.data() + dy * kw * c, in + ((oy + dy) * input.width() + ox) * c,
                      static_cast<std::size_t>(kw * c) * sizeof(float));
        float* cell = o + (oy * ow + ox) * kn;
        for (Index k = 0; k < kn; ++k)
          cell[k] = kernels[static_cast<std::size_t>(k)].scale *
                        detail::signed_patch_sum(patch.data(),
                                                 masks[static_cast<std::size_t>(k)].data(),
                                                 patch_len) +
                    biases[k];
      }
  }
  return out;
}

// Single-kernel form; output is (h-kh+1, w-kw+1, 1, batch).
inline Tensor<float> binarized_conv_forward(const Tensor<float>& input,
                                            const BinarizedKernel& kernel, Index kh,
                                            Index kw, float bias) {
  VecX<float> b(1);
  b[0] = bias;
  return binarized_conv_layer_forward(input, {kernel}, kh, kw, b);
}

// Deployment form of a trained network: per-kernel packed signs and scales,
// float biases, layer specs unchanged.
struct BinarizedModel {
  std::vector<LayerSpec> layers;
  std::vector<std::vector<BinarizedKernel>> kernels;  // parallel to layers
  std::vector<VecX<float>> biases;

  Index kernel_total() const {
    Index t = 0;
    for (const auto& ks : kernels) t += static_cast<Index>(ks.size());
    return t;
  }
  Index weight_bits() const {
    Index t = 0;
    for (const auto& ks : kernels)
      for (const auto& k : ks) t += k.n;
    return t;
  }
  Index packed_weight_bytes() const {
    Index t = 0;
    for (const auto& ks : kernels)
      for (const auto& k : ks) t += k.packed_bytes();
    return t;
  }
  Index scale_bytes() const { return kernel_total() * static_cast<Index>(sizeof(float)); }

  // Forward pass on the true deployment path: every parameterized layer runs
  // the add/subtract convolution (fully connected layers as 1x1 kernels over
  // the flattened input).
  Tensor<float> forward(const Tensor<float>& input) const {
    Tensor<float> x = input;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& spec = layers[i];
      switch (spec.kind) {
        case LayerKind::Conv:
        case LayerKind::FullyConnected: {
          Tensor<float> in = std::move(x);
          Index kh = spec.kernel_h, kw = spec.kernel_w;
          if (spec.kind == LayerKind::FullyConnected) {
            require(in.slice_size() == spec.in_features,
                    "binarized forward: flattened input length mismatch");
            in = reshape_flat(in, spec.in_features);
            kh = 1;
            kw = 1;
          }
          x = binarized_conv_layer_forward(in, kernels[i], kh, kw, biases[i]);
          break;
        }
        case LayerKind::MaxPool:
          x = maxpool_forward(x, spec.window, spec.stride);
          break;
        case LayerKind::Relu:
          x = relu_forward(x);
          break;
        case LayerKind::Softmax: {
          for (Index n = 0; n < x.count(); ++n) {
            VecX<float> p = softmax(VecX<float>(x.slice_vec(n)));
            x.slice_vec(n) = p;
          }
          break;
        }
      }
    }
    return x;
  }

 private:
  static Tensor<float> reshape_flat(const Tensor<float>& t, Index features) {
    Tensor<float> out(1, 1, features, t.count());
    out.vec() = t.vec();
    return out;
  }
};

// Binarizes every kernel of every parameterized layer independently; each
// fully connected neuron becomes one kernel whose size equals the layer input.
// Biases are copied unmodified.
inline BinarizedModel binarize_model(const Network<float>& net) {
  BinarizedModel m;
  m.layers = net.layers;
  m.kernels.resize(net.layers.size());
  m.biases.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.has_params(i)) continue;
    const auto& w = net.weights[i];
    m.kernels[i].reserve(static_cast<std::size_t>(w.count()));
    for (Index k = 0; k < w.count(); ++k)
      m.kernels[i].push_back(binarize_kernel(w.slice(k), w.slice_size()));
    m.biases[i] = net.biases[i];
  }
  return m;
}

// Training with per-iteration binarization. The float "shadow" weights are the
// optimizer's state; at the start of every iteration the network's working
// weights are re-materialized as alpha*B from the shadow, gradients are
// computed against those binarized weights, and the updates land on the shadow
// (straight-through). Biases stay float and are updated in place on the net.
class BinarizedTrainer {
 public:
  BinarizedTrainer(Network<float>& net, bool xnor_grad_correction = false)
      : net_(net), state_(net), xnor_grad_correction_(xnor_grad_correction) {
    for (const auto& w : net.weights) shadow_.push_back(w);
  }

  const std::vector<Tensor<float>>& shadow() const { return shadow_; }
  std::vector<Tensor<float>>& shadow() { return shadow_; }

  // net.weights <- alpha * B derived from the shadow weights.
  void rebinarize() {
    for (std::size_t i = 0; i < net_.layers.size(); ++i) {
      if (!net_.has_params(i)) continue;
      require(shadow_[i].same_shape(net_.weights[i]),
              "binarized_training_step: shadow/net shape drift");
      auto& w = net_.weights[i];
      for (Index k = 0; k < w.count(); ++k) {
        const auto bk = binarize_kernel(shadow_[i].slice(k), w.slice_size());
        materialize_kernel(bk, w.slice(k));
      }
    }
  }

  // One SGD iteration over a batch; returns the summed loss. Gradient means
  // are taken over the batch. probs_out, when given, receives the batch
  // probabilities from the pre-update forward pass.
  float step(const Tensor<float>& batch, const std::vector<Index>& labels, float lr,
             float momentum, Tensor<float>* probs_out = nullptr) {
    rebinarize();
    auto grads = net_.zero_gradients();
    auto trace = net_.forward_trace(batch);
    const float loss = net_.backward(trace, labels, grads);
    if (probs_out != nullptr) *probs_out = trace.output();
    const float inv_batch = 1.f / static_cast<float>(batch.count());

    for (std::size_t i = 0; i < net_.layers.size(); ++i) {
      if (!net_.has_params(i)) continue;
      VecX<float> gw = grads.weights[i].vec() * inv_batch;
      if (xnor_grad_correction_) apply_xnor_correction(i, gw);
      auto& vw = state_.weight_velocity[i];
      vw.vec() = momentum * vw.vec() - lr * gw;
      shadow_[i].vec() += vw.vec();

      auto& vb = state_.bias_velocity[i];
      vb = momentum * vb - lr * (grads.biases[i] * inv_batch);
      net_.biases[i] += vb;
    }
    return loss;
  }

 private:
  // Optional fuller chain rule through alpha = mean|w|:
  // dJ/dw_i = dJ/dw~_i * (1/n + alpha * 1[|w_i| <= 1]).
  void apply_xnor_correction(std::size_t layer, VecX<float>& gw) {
    const auto& sh = shadow_[layer];
    const Index n = sh.slice_size();
    for (Index k = 0; k < sh.count(); ++k) {
      const float* w = sh.slice(k);
      long double abs_sum = 0;
      for (Index i = 0; i < n; ++i) abs_sum += std::abs(static_cast<long double>(w[i]));
      const float alpha = static_cast<float>(abs_sum / static_cast<long double>(n));
      float* g = gw.data() + k * n;
      for (Index i = 0; i < n; ++i)
        g[i] *= 1.f / static_cast<float>(n) + (std::abs(w[i]) <= 1.f ? alpha : 0.f);
    }
  }

  Network<float>& net_;
  std::vector<Tensor<float>> shadow_;
  SgdState<float> state_;
  bool xnor_grad_correction_;
};

}  // namespace hgr
