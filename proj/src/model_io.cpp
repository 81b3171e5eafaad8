#include "hgr/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hgr {

namespace {

void put_u8(std::ostream& out, std::uint8_t v) {
  out.put(static_cast<char>(v));
}

void put_u32le(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF),
                     static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

void put_f32le(std::ostream& out, float v) {
  put_u32le(out, std::bit_cast<std::uint32_t>(v));
}

std::uint8_t get_u8(std::istream& in, const std::string& what) {
  const int c = in.get();
  if (c == EOF) throw Error("model file: truncated " + what);
  return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32le(std::istream& in, const std::string& what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw Error("model file: truncated " + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32le(std::istream& in, const std::string& what) {
  return std::bit_cast<float>(get_u32le(in, what));
}

void write_specs(std::ostream& out, const std::vector<LayerSpec>& layers) {
  require(layers.size() <= 255, "model file: too many layers");
  put_u8(out, static_cast<std::uint8_t>(layers.size()));
  for (const auto& s : layers) {
    put_u8(out, static_cast<std::uint8_t>(s.kind));
    switch (s.kind) {
      case LayerKind::Conv:
        put_u32le(out, static_cast<std::uint32_t>(s.kernel_count));
        put_u32le(out, static_cast<std::uint32_t>(s.kernel_h));
        put_u32le(out, static_cast<std::uint32_t>(s.kernel_w));
        put_u32le(out, static_cast<std::uint32_t>(s.in_channels));
        break;
      case LayerKind::MaxPool:
        put_u32le(out, static_cast<std::uint32_t>(s.window));
        put_u32le(out, static_cast<std::uint32_t>(s.stride));
        break;
      case LayerKind::FullyConnected:
        put_u32le(out, static_cast<std::uint32_t>(s.in_features));
        put_u32le(out, static_cast<std::uint32_t>(s.out_features));
        break;
      case LayerKind::Relu:
      case LayerKind::Softmax:
        break;
    }
  }
}

std::vector<LayerSpec> read_specs(std::istream& in) {
  const std::uint8_t n = get_u8(in, "layer count");
  std::vector<LayerSpec> layers;
  layers.reserve(n);
  for (int i = 0; i < n; ++i) {
    const std::uint8_t tag = get_u8(in, "layer kind");
    switch (static_cast<LayerKind>(tag)) {
      case LayerKind::Conv: {
        const auto kc = get_u32le(in, "conv dims");
        const auto kh = get_u32le(in, "conv dims");
        const auto kw = get_u32le(in, "conv dims");
        const auto ic = get_u32le(in, "conv dims");
        layers.push_back(LayerSpec::conv(kc, kh, kw, ic));
        break;
      }
      case LayerKind::MaxPool: {
        const auto w = get_u32le(in, "pool dims");
        const auto s = get_u32le(in, "pool dims");
        layers.push_back(LayerSpec::maxpool(w, s));
        break;
      }
      case LayerKind::FullyConnected: {
        const auto fi = get_u32le(in, "fc dims");
        const auto fo = get_u32le(in, "fc dims");
        layers.push_back(LayerSpec::fully_connected(fi, fo));
        break;
      }
      case LayerKind::Relu:
        layers.push_back(LayerSpec::relu());
        break;
      case LayerKind::Softmax:
        layers.push_back(LayerSpec::softmax());
        break;
      default:
        throw Error("model file: unknown layer kind tag " + std::to_string(tag));
    }
  }
  return layers;
}

void check_magic(std::istream& in, const char expect[4], const std::string& path) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, expect, 4) != 0)
    throw Error("model file: bad magic in " + path + " (expected " +
                std::string(expect, 4) + ")");
  const std::uint8_t version = get_u8(in, "version");
  if (version != 1)
    throw Error("model file: unsupported version " + std::to_string(version) + " in " +
                path);
}

void check_trailing(std::istream& in, const std::string& path) {
  if (in.peek() != EOF) throw Error("model file: trailing data in " + path);
}

}  // namespace

void write_float_model(const std::filesystem::path& path, const Network<float>& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("model file: cannot write " + path.string());
  out.write("HGRF", 4);
  put_u8(out, 1);
  write_specs(out, net.layers);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.has_params(i)) continue;
    const auto w = net.weights[i].vec();
    for (Index j = 0; j < w.size(); ++j) put_f32le(out, w[j]);
    for (Index j = 0; j < net.biases[i].size(); ++j) put_f32le(out, net.biases[i][j]);
  }
  if (!out) throw Error("model file: failed writing " + path.string());
}

Network<float> read_float_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("model file: cannot open " + path.string());
  check_magic(in, "HGRF", path.string());

  Network<float> net;
  for (const auto& spec : read_specs(in)) net.add(spec);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!net.has_params(i)) continue;
    auto w = net.weights[i].vec();
    for (Index j = 0; j < w.size(); ++j) w[j] = get_f32le(in, "weights");
    for (Index j = 0; j < net.biases[i].size(); ++j)
      net.biases[i][j] = get_f32le(in, "biases");
  }
  check_trailing(in, path.string());
  return net;
}

void write_binarized_model(const std::filesystem::path& path, const BinarizedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("model file: cannot write " + path.string());
  out.write("HGRB", 4);
  put_u8(out, 1);
  write_specs(out, model.layers);
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    if (model.kernels[i].empty()) continue;
    for (const auto& k : model.kernels[i]) {
      put_u32le(out, static_cast<std::uint32_t>(k.n));
      out.write(reinterpret_cast<const char*>(k.bits.data()),
                static_cast<std::streamsize>(k.bits.size()));
      put_f32le(out, k.scale);
    }
    for (Index j = 0; j < model.biases[i].size(); ++j) put_f32le(out, model.biases[i][j]);
  }
  if (!out) throw Error("model file: failed writing " + path.string());
}

BinarizedModel read_binarized_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("model file: cannot open " + path.string());
  check_magic(in, "HGRB", path.string());

  BinarizedModel model;
  model.layers = read_specs(in);
  model.kernels.resize(model.layers.size());
  model.biases.resize(model.layers.size());
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& spec = model.layers[i];
    Index kernel_count = 0, kernel_size = 0;
    if (spec.kind == LayerKind::Conv) {
      kernel_count = spec.kernel_count;
      kernel_size = spec.kernel_h * spec.kernel_w * spec.in_channels;
    } else if (spec.kind == LayerKind::FullyConnected) {
      kernel_count = spec.out_features;
      kernel_size = spec.in_features;
    } else {
      continue;
    }
    model.kernels[i].reserve(static_cast<std::size_t>(kernel_count));
    for (Index k = 0; k < kernel_count; ++k) {
      BinarizedKernel bk;
      bk.n = static_cast<Index>(get_u32le(in, "kernel size"));
      require(bk.n == kernel_size, "model file: kernel size mismatch in " + path.string());
      bk.bits.resize(static_cast<std::size_t>(bk.packed_bytes()));
      in.read(reinterpret_cast<char*>(bk.bits.data()),
              static_cast<std::streamsize>(bk.bits.size()));
      if (!in) throw Error("model file: truncated kernel bits in " + path.string());
      bk.scale = get_f32le(in, "kernel scale");
      model.kernels[i].push_back(std::move(bk));
    }
    model.biases[i].resize(kernel_count);
    for (Index j = 0; j < kernel_count; ++j)
      model.biases[i][j] = get_f32le(in, "biases");
  }
  check_trailing(in, path.string());
  return model;
}

}  // namespace hgr
