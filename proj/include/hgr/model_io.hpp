#pragma once

#include <filesystem>

#include "hgr/binarize.hpp"
#include "hgr/network.hpp"

namespace hgr {

// Float model file (.hgm): magic "HGRF", u8 version = 1, u8 layer count,
// per layer a u8 kind tag (conv=1, maxpool=2, fc=3, relu=4, softmax=5) plus
// u32 dims (conv: kernel_count, kernel_h, kernel_w, in_channels; maxpool:
// window, stride; fc: in, out), then per parameterized layer all weights
// followed by all biases as little-endian float32 in layer order.
void write_float_model(const std::filesystem::path& path, const Network<float>& net);
Network<float> read_float_model(const std::filesystem::path& path);

// Binarized model file (.hgb): magic "HGRB", u8 version = 1, layer specs as in
// .hgm; per parameterized layer: per-kernel records [u32 n][ceil(n/8) bytes of
// MSB-first sign bits][float32 alpha], then the float32 bias vector. All
// integers little-endian.
void write_binarized_model(const std::filesystem::path& path, const BinarizedModel& model);
BinarizedModel read_binarized_model(const std::filesystem::path& path);

}  // namespace hgr
