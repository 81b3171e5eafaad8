#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hgr/error.hpp"
#include "hgr/tensor.hpp"

namespace hgr {

// Depth image; lower value = closer to the camera, 0 = occluded.
struct DepthMap {
  Index width = 0, height = 0;
  std::vector<std::uint16_t> values;  // row-major

  DepthMap() = default;
  DepthMap(Index h, Index w)
      : width(w), height(h), values(static_cast<std::size_t>(h * w), 0) {
    require(h > 0 && w > 0, "DepthMap: dimensions must be positive");
  }

  std::uint16_t& at(Index y, Index x) { return values[static_cast<std::size_t>(y * width + x)]; }
  std::uint16_t at(Index y, Index x) const {
    return values[static_cast<std::size_t>(y * width + x)];
  }
};

struct BinaryMask {
  Index width = 0, height = 0;
  std::vector<std::uint8_t> values;  // row-major, each 0 or 1

  BinaryMask() = default;
  BinaryMask(Index h, Index w)
      : width(w), height(h), values(static_cast<std::size_t>(h * w), 0) {
    require(h > 0 && w > 0, "BinaryMask: dimensions must be positive");
  }

  std::uint8_t& at(Index y, Index x) { return values[static_cast<std::size_t>(y * width + x)]; }
  std::uint8_t at(Index y, Index x) const {
    return values[static_cast<std::size_t>(y * width + x)];
  }

  Index foreground_count() const {
    Index n = 0;
    for (auto v : values) n += v;
    return n;
  }

  bool operator==(const BinaryMask& o) const {
    return width == o.width && height == o.height && values == o.values;
  }
};

// Rotation about the image center, nearest-neighbor sampling, out-of-frame
// fill 0, output dims unchanged. Keeps masks strictly binary.
inline BinaryMask rotate_mask(const BinaryMask& mask, double degrees) {
  if (degrees == 0.0) return mask;
  const double rad = degrees * M_PI / 180.0;
  const double cos_a = std::cos(rad), sin_a = std::sin(rad);
  const double cy = (static_cast<double>(mask.height) - 1.0) / 2.0;
  const double cx = (static_cast<double>(mask.width) - 1.0) / 2.0;

  BinaryMask out(mask.height, mask.width);
  for (Index y = 0; y < mask.height; ++y)
    for (Index x = 0; x < mask.width; ++x) {
      // inverse map: sample the source at the back-rotated position
      const double dy = static_cast<double>(y) - cy;
      const double dx = static_cast<double>(x) - cx;
      const double sx = cx + cos_a * dx + sin_a * dy;
      const double sy = cy - sin_a * dx + cos_a * dy;
      const Index ix = static_cast<Index>(std::lround(sx));
      const Index iy = static_cast<Index>(std::lround(sy));
      if (ix >= 0 && ix < mask.width && iy >= 0 && iy < mask.height)
        out.at(y, x) = mask.at(iy, ix);
    }
  return out;
}

inline Tensor<float> mask_to_tensor(const BinaryMask& mask) {
  Tensor<float> t(mask.height, mask.width, 1, 1);
  for (Index i = 0; i < t.size(); ++i)
    t.data()[i] = static_cast<float>(mask.values[static_cast<std::size_t>(i)]);
  return t;
}

}  // namespace hgr
