#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <vector>

#include "hgr/error.hpp"
#include "hgr/tensor.hpp"

namespace hgr {

enum class LayerKind : std::uint8_t {
  Conv = 1,
  MaxPool = 2,
  FullyConnected = 3,
  Relu = 4,
  Softmax = 5,
};

struct LayerSpec {
  LayerKind kind;
  // conv
  Index kernel_count = 0, kernel_h = 0, kernel_w = 0, in_channels = 0;
  // maxpool
  Index window = 0, stride = 0;
  // fully connected
  Index in_features = 0, out_features = 0;

  static LayerSpec conv(Index kernel_count, Index kernel_h, Index kernel_w, Index in_channels) {
    LayerSpec s{LayerKind::Conv};
    s.kernel_count = kernel_count;
    s.kernel_h = kernel_h;
    s.kernel_w = kernel_w;
    s.in_channels = in_channels;
    return s;
  }
  static LayerSpec maxpool(Index window, Index stride) {
    LayerSpec s{LayerKind::MaxPool};
    s.window = window;
    s.stride = stride;
    return s;
  }
  static LayerSpec fully_connected(Index in_features, Index out_features) {
    LayerSpec s{LayerKind::FullyConnected};
    s.in_features = in_features;
    s.out_features = out_features;
    return s;
  }
  static LayerSpec relu() { return LayerSpec{LayerKind::Relu}; }
  static LayerSpec softmax() { return LayerSpec{LayerKind::Softmax}; }
};

// Output shape of a layer given its input shape (h, w, c); count passes through.
inline std::array<Index, 3> layer_output_shape(const LayerSpec& s,
                                               const std::array<Index, 3>& in) {
  switch (s.kind) {
    case LayerKind::Conv: {
      require(in[2] == s.in_channels, "conv: input channel count mismatch");
      require(in[0] >= s.kernel_h && in[1] >= s.kernel_w,
              "conv: input smaller than kernel");
      return {in[0] - s.kernel_h + 1, in[1] - s.kernel_w + 1, s.kernel_count};
    }
    case LayerKind::MaxPool: {
      require(s.window > 0 && s.stride > 0, "maxpool: window and stride must be positive");
      require(in[0] >= s.window && in[1] >= s.window, "maxpool: input smaller than window");
      require((in[0] - s.window) % s.stride == 0 && (in[1] - s.window) % s.stride == 0,
              "maxpool: spatial dims not divisible by stride");
      return {(in[0] - s.window) / s.stride + 1, (in[1] - s.window) / s.stride + 1, in[2]};
    }
    case LayerKind::FullyConnected: {
      require(in[0] * in[1] * in[2] == s.in_features,
              "fully_connected: flattened input length mismatch");
      return {1, 1, s.out_features};
    }
    case LayerKind::Relu:
    case LayerKind::Softmax:
      return in;
  }
  throw Error("layer_output_shape: unknown layer kind");
}

namespace detail {

// Patch matrix for valid cross-correlation: one row per output position
// (row-major), one column per kernel element in (dy, dx, c) order, matching
// the contiguous layout of a kernel slice. `rows` must point at
// (h-kh+1)*(w-kw+1) rows of kh*kw*c columns.
template <typename Scalar>
void im2col(const Scalar* in, Index h, Index w, Index c, Index kh, Index kw,
            Scalar* rows) {
  const Index oh = h - kh + 1;
  const Index ow = w - kw + 1;
  const Index row_len = kh * kw * c;
  for (Index oy = 0; oy < oh; ++oy) {
    for (Index ox = 0; ox < ow; ++ox) {
      Scalar* row = rows + (oy * ow + ox) * row_len;
      for (Index dy = 0; dy < kh; ++dy) {
        const Scalar* src = in + ((oy + dy) * w + ox) * c;
        Scalar* dst = row + dy * kw * c;
        for (Index i = 0; i < kw * c; ++i) dst[i] = src[i];
      }
    }
  }
}

template <typename Scalar>
void col2im_add(const Scalar* rows, Index h, Index w, Index c, Index kh, Index kw,
                Scalar* out) {
  const Index oh = h - kh + 1;
  const Index ow = w - kw + 1;
  const Index row_len = kh * kw * c;
  for (Index oy = 0; oy < oh; ++oy) {
    for (Index ox = 0; ox < ow; ++ox) {
      const Scalar* row = rows + (oy * ow + ox) * row_len;
      for (Index dy = 0; dy < kh; ++dy) {
        Scalar* dst = out + ((oy + dy) * w + ox) * c;
        const Scalar* src = row + dy * kw * c;
        for (Index i = 0; i < kw * c; ++i) dst[i] += src[i];
      }
    }
  }
}

// Grow-only per-thread scratch, reused across layer calls to keep the hot
// loop free of allocations.
template <typename Scalar>
Scalar* scratch(std::size_t slot, Index size) {
  thread_local std::vector<Scalar> buffers[2];
  auto& buf = buffers[slot];
  if (buf.size() < static_cast<std::size_t>(size))
    buf.resize(static_cast<std::size_t>(size));
  return buf.data();
}

}  // namespace detail

// Valid (no padding) cross-correlation. weights is (kh, kw, c, kernel_count);
// output is (h-kh+1, w-kw+1, kernel_count, batch).
template <typename Scalar>
Tensor<Scalar> conv2d_forward(const Tensor<Scalar>& input, const Tensor<Scalar>& weights,
                              const VecX<Scalar>& biases) {
  require(input.channels() == weights.channels(),
          "conv2d_forward: input has " + std::to_string(input.channels()) +
              " channels, kernels expect " + std::to_string(weights.channels()));
  require(input.height() >= weights.height() && input.width() >= weights.width(),
          "conv2d_forward: input " + input.shape_str() + " smaller than kernel " +
              weights.shape_str());
  require(biases.size() == weights.count(), "conv2d_forward: bias count mismatch");

  const Index oh = input.height() - weights.height() + 1;
  const Index ow = input.width() - weights.width() + 1;
  const Index k = weights.count();
  Tensor<Scalar> out(oh, ow, k, input.count());

  // Per-sample im2col into a reused scratch block keeps the working set small
  // enough to stay cache-resident across the batch.
  const Index patch_len = weights.slice_size();
  MapMat<Scalar> patches(detail::scratch<Scalar>(0, oh * ow * patch_len), oh * ow,
                         patch_len);
  for (Index n = 0; n < input.count(); ++n) {
    detail::im2col(input.slice(n), input.height(), input.width(), input.channels(),
                   weights.height(), weights.width(), patches.data());
    MapMat<Scalar> o(out.slice(n), oh * ow, k);
    o.noalias() = patches * weights.rows().transpose();
    o.rowwise() += biases.transpose();
  }
  return out;
}

// Gradients of conv2d_forward. grad_weights/grad_biases are accumulated into
// (caller zeroes them); grad_input may be null when the input needs no gradient.
template <typename Scalar>
void conv2d_backward(const Tensor<Scalar>& input, const Tensor<Scalar>& weights,
                     const Tensor<Scalar>& grad_out, Tensor<Scalar>* grad_input,
                     Tensor<Scalar>& grad_weights, VecX<Scalar>& grad_biases) {
  const Index oh = grad_out.height();
  const Index ow = grad_out.width();
  const Index k = weights.count();
  require(grad_out.channels() == k && grad_out.count() == input.count(),
          "conv2d_backward: gradient shape mismatch");

  const Index rows = oh * ow;
  const Index patch_len = weights.slice_size();
  MapMat<Scalar> patches(detail::scratch<Scalar>(0, rows * patch_len), rows, patch_len);
  MapMat<Scalar> gpatches(detail::scratch<Scalar>(1, rows * patch_len), rows, patch_len);
  auto gw = grad_weights.rows();
  for (Index n = 0; n < input.count(); ++n) {
    detail::im2col(input.slice(n), input.height(), input.width(), input.channels(),
                   weights.height(), weights.width(), patches.data());
    ConstMapMat<Scalar> go(grad_out.slice(n), rows, k);
    gw.noalias() += go.transpose() * patches;
    grad_biases.noalias() += go.colwise().sum().transpose();
    if (grad_input != nullptr) {
      gpatches.noalias() = go * weights.rows();
      detail::col2im_add(gpatches.data(), input.height(), input.width(), input.channels(),
                         weights.height(), weights.width(), grad_input->slice(n));
    }
  }
}

// Per-channel max pooling; argmax (flat index into the input slice for every
// output element, in output layout order) is recorded when requested so the
// backward pass can scatter gradients.
template <typename Scalar>
Tensor<Scalar> maxpool_forward(const Tensor<Scalar>& input, Index window, Index stride,
                               std::vector<Index>* argmax = nullptr) {
  const auto out_shape =
      layer_output_shape(LayerSpec::maxpool(window, stride),
                         {input.height(), input.width(), input.channels()});
  const Index oh = out_shape[0], ow = out_shape[1], c = input.channels();
  Tensor<Scalar> out(oh, ow, c, input.count());
  if (argmax != nullptr) argmax->assign(static_cast<std::size_t>(out.size()), 0);

  for (Index n = 0; n < input.count(); ++n) {
    const Scalar* in = input.slice(n);
    Scalar* o = out.slice(n);
    for (Index oy = 0; oy < oh; ++oy) {
      for (Index ox = 0; ox < ow; ++ox) {
        for (Index ch = 0; ch < c; ++ch) {
          Index best = ((oy * stride) * input.width() + ox * stride) * c + ch;
          Scalar best_v = in[best];
          for (Index dy = 0; dy < window; ++dy) {
            for (Index dx = 0; dx < window; ++dx) {
              const Index idx =
                  ((oy * stride + dy) * input.width() + (ox * stride + dx)) * c + ch;
              if (in[idx] > best_v) {
                best_v = in[idx];
                best = idx;
              }
            }
          }
          const Index out_idx = (oy * ow + ox) * c + ch;
          o[out_idx] = best_v;
          if (argmax != nullptr)
            (*argmax)[static_cast<std::size_t>(n * out.slice_size() + out_idx)] = best;
        }
      }
    }
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> maxpool_backward(const std::array<Index, 4>& input_shape,
                                const std::vector<Index>& argmax,
                                const Tensor<Scalar>& grad_out) {
  Tensor<Scalar> grad_in(input_shape[0], input_shape[1], input_shape[2], input_shape[3]);
  require(static_cast<Index>(argmax.size()) == grad_out.size(),
          "maxpool_backward: argmax size mismatch");
  for (Index n = 0; n < grad_out.count(); ++n) {
    Scalar* gi = grad_in.slice(n);
    const Scalar* go = grad_out.slice(n);
    const Index base = n * grad_out.slice_size();
    for (Index i = 0; i < grad_out.slice_size(); ++i)
      gi[argmax[static_cast<std::size_t>(base + i)]] += go[i];
  }
  return grad_in;
}

// Dense layer: out[j] = sum_i in[i] * W[j][i] + b[j]. The weight tensor keeps
// one kernel slice per neuron (count = out_features, slice length = in_features)
// so a fully connected layer is a 1x1 "convolution" over the flattened input.
template <typename Scalar>
Tensor<Scalar> fc_forward(const Tensor<Scalar>& input, const Tensor<Scalar>& weights,
                          const VecX<Scalar>& biases) {
  require(input.slice_size() == weights.slice_size(),
          "fc_forward: flattened input length " + std::to_string(input.slice_size()) +
              " != weight row length " + std::to_string(weights.slice_size()));
  require(biases.size() == weights.count(), "fc_forward: bias count mismatch");
  const Index k = weights.count();
  Tensor<Scalar> out(1, 1, k, input.count());
  auto o = out.rows();                           // batch x k
  o.noalias() = input.rows() * weights.rows().transpose();
  o.rowwise() += biases.transpose();
  return out;
}

template <typename Scalar>
void fc_backward(const Tensor<Scalar>& input, const Tensor<Scalar>& weights,
                 const Tensor<Scalar>& grad_out, Tensor<Scalar>* grad_input,
                 Tensor<Scalar>& grad_weights, VecX<Scalar>& grad_biases) {
  auto go = grad_out.rows();  // batch x k
  grad_weights.rows().noalias() += go.transpose() * input.rows();
  grad_biases.noalias() += go.colwise().sum().transpose();
  if (grad_input != nullptr) grad_input->rows().noalias() = go * weights.rows();
}

template <typename Scalar>
Tensor<Scalar> relu_forward(const Tensor<Scalar>& input) {
  Tensor<Scalar> out = input;
  out.vec() = out.vec().cwiseMax(Scalar(0));
  return out;
}

template <typename Scalar>
Tensor<Scalar> relu_backward(const Tensor<Scalar>& input, const Tensor<Scalar>& grad_out) {
  Tensor<Scalar> grad_in = grad_out;
  grad_in.vec().array() *= (input.vec().array() > Scalar(0)).template cast<Scalar>();
  return grad_in;
}

template <typename Scalar>
VecX<Scalar> softmax(const VecX<Scalar>& logits) {
  VecX<Scalar> p = (logits.array() - logits.maxCoeff()).exp();
  p /= p.sum();
  return p;
}

template <typename Scalar>
struct SoftmaxLoss {
  Scalar loss;
  VecX<Scalar> probabilities;
};

// Numerically stabilized softmax + cross-entropy against a class index.
template <typename Scalar>
SoftmaxLoss<Scalar> softmax_cross_entropy(const VecX<Scalar>& logits, Index label) {
  require(label >= 0 && label < logits.size(),
          "softmax_cross_entropy: label " + std::to_string(label) + " out of range [0, " +
              std::to_string(logits.size()) + ")");
  const Scalar m = logits.maxCoeff();
  VecX<Scalar> shifted = logits.array() - m;
  const Scalar lse = std::log(shifted.array().exp().sum());
  SoftmaxLoss<Scalar> r;
  r.loss = lse - shifted[label];
  r.probabilities = (shifted.array() - lse).exp();
  return r;
}

}  // namespace hgr
