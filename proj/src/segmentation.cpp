#include "hgr/segmentation.hpp"

#include <iostream>
#include <limits>
#include <vector>

namespace hgr {

namespace {

struct Pixel {
  Index y, x;
};

}  // namespace

ThresholdResult threshold_depth(const DepthMap& depth, const SegmentationParams& params) {
  require(params.depth_alpha >= 0, "threshold_depth: depth_alpha must be >= 0");
  require(depth.width > 0 && depth.height > 0, "threshold_depth: empty depth map");

  std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
  Index seed_y = -1, seed_x = -1;
  for (Index y = 0; y < depth.height; ++y)
    for (Index x = 0; x < depth.width; ++x) {
      const std::uint16_t v = depth.at(y, x);
      if (v > 0 && v < m) {
        m = v;
        seed_y = y;
        seed_x = x;
      }
    }
  if (seed_y < 0)
    throw Error("threshold_depth: segmentation failure, depth map has no nonzero values");

  const std::uint32_t threshold = m + static_cast<std::uint32_t>(params.depth_alpha);
  ThresholdResult r;
  r.mask = BinaryMask(depth.height, depth.width);
  r.min_depth = static_cast<std::uint16_t>(m);
  r.seed_y = seed_y;
  r.seed_x = seed_x;
  for (Index y = 0; y < depth.height; ++y)
    for (Index x = 0; x < depth.width; ++x) {
      const std::uint16_t v = depth.at(y, x);
      r.mask.at(y, x) = (v > 0 && v <= threshold) ? 1 : 0;
    }
  return r;
}

BinaryMask dilate(const BinaryMask& mask) {
  BinaryMask out(mask.height, mask.width);
  for (Index y = 0; y < mask.height; ++y)
    for (Index x = 0; x < mask.width; ++x) {
      std::uint8_t v = 0;
      for (Index dy = -1; dy <= 1 && !v; ++dy)
        for (Index dx = -1; dx <= 1 && !v; ++dx) {
          const Index ny = y + dy, nx = x + dx;
          if (ny >= 0 && ny < mask.height && nx >= 0 && nx < mask.width)
            v = mask.at(ny, nx);
        }
      out.at(y, x) = v;
    }
  return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
  // Flood the background from the border with 4-connectivity; anything that
  // stays unreached is an enclosed hole.
  BinaryMask reached(mask.height, mask.width);
  std::vector<Pixel> stack;
  auto push = [&](Index y, Index x) {
    if (y < 0 || y >= mask.height || x < 0 || x >= mask.width) return;
    if (mask.at(y, x) || reached.at(y, x)) return;
    reached.at(y, x) = 1;
    stack.push_back({y, x});
  };
  for (Index x = 0; x < mask.width; ++x) {
    push(0, x);
    push(mask.height - 1, x);
  }
  for (Index y = 0; y < mask.height; ++y) {
    push(y, 0);
    push(y, mask.width - 1);
  }
  while (!stack.empty()) {
    const Pixel p = stack.back();
    stack.pop_back();
    push(p.y - 1, p.x);
    push(p.y + 1, p.x);
    push(p.y, p.x - 1);
    push(p.y, p.x + 1);
  }

  BinaryMask out = mask;
  for (Index y = 0; y < mask.height; ++y)
    for (Index x = 0; x < mask.width; ++x)
      if (!mask.at(y, x) && !reached.at(y, x)) out.at(y, x) = 1;
  return out;
}

namespace {

// 8-connected flood fill from a seed; marks visited pixels in `component`.
Index flood8(const BinaryMask& mask, BinaryMask& component, Index seed_y, Index seed_x) {
  std::vector<Pixel> stack{{seed_y, seed_x}};
  component.at(seed_y, seed_x) = 1;
  Index size = 1;
  while (!stack.empty()) {
    const Pixel p = stack.back();
    stack.pop_back();
    for (Index dy = -1; dy <= 1; ++dy)
      for (Index dx = -1; dx <= 1; ++dx) {
        const Index ny = p.y + dy, nx = p.x + dx;
        if (ny < 0 || ny >= mask.height || nx < 0 || nx >= mask.width) continue;
        if (!mask.at(ny, nx) || component.at(ny, nx)) continue;
        component.at(ny, nx) = 1;
        ++size;
        stack.push_back({ny, nx});
      }
  }
  return size;
}

}  // namespace

BinaryMask largest_component_containing(const BinaryMask& mask, Index seed_y, Index seed_x) {
  require(seed_y >= 0 && seed_y < mask.height && seed_x >= 0 && seed_x < mask.width,
          "largest_component_containing: seed outside the image");
  require(mask.at(seed_y, seed_x) != 0,
          "largest_component_containing: segmentation failure, seed pixel is background");
  BinaryMask component(mask.height, mask.width);
  flood8(mask, component, seed_y, seed_x);
  return component;
}

BinaryMask largest_component(const BinaryMask& mask) {
  BinaryMask visited(mask.height, mask.width);
  BinaryMask best(mask.height, mask.width);
  Index best_size = 0;
  for (Index y = 0; y < mask.height; ++y)
    for (Index x = 0; x < mask.width; ++x) {
      if (!mask.at(y, x) || visited.at(y, x)) continue;
      BinaryMask component(mask.height, mask.width);
      const Index size = flood8(mask, component, y, x);
      for (Index i = 0; i < mask.height * mask.width; ++i)
        visited.values[static_cast<std::size_t>(i)] |=
            component.values[static_cast<std::size_t>(i)];
      if (size > best_size) {
        best_size = size;
        best = component;
      }
    }
  return best;
}

BinaryMask resize_mask(const BinaryMask& mask, Index out_h, Index out_w) {
  require(mask.height >= 1 && mask.width >= 1, "resize_mask: empty source");
  require(out_h >= 1 && out_w >= 1, "resize_mask: empty target");
  if (mask.height == out_h && mask.width == out_w) return mask;

  BinaryMask out(out_h, out_w);
  if (mask.height >= out_h && mask.width >= out_w) {
    // exact area-weighted box average
    const double sy = static_cast<double>(mask.height) / static_cast<double>(out_h);
    const double sx = static_cast<double>(mask.width) / static_cast<double>(out_w);
    for (Index j = 0; j < out_h; ++j) {
      const double y0 = j * sy, y1 = (j + 1) * sy;
      for (Index i = 0; i < out_w; ++i) {
        const double x0 = i * sx, x1 = (i + 1) * sx;
        double sum = 0;
        for (Index y = static_cast<Index>(y0); y < mask.height && y < y1; ++y) {
          const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
          if (wy <= 0) continue;
          for (Index x = static_cast<Index>(x0); x < mask.width && x < x1; ++x) {
            const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
            if (wx <= 0) continue;
            sum += wy * wx * mask.at(y, x);
          }
        }
        out.at(j, i) = (sum / (sy * sx)) >= 0.5 ? 1 : 0;
      }
    }
  } else {
    // bilinear upsample
    const double sy = static_cast<double>(mask.height) / static_cast<double>(out_h);
    const double sx = static_cast<double>(mask.width) / static_cast<double>(out_w);
    for (Index j = 0; j < out_h; ++j) {
      double fy = (j + 0.5) * sy - 0.5;
      fy = std::max(0.0, std::min(fy, static_cast<double>(mask.height - 1)));
      const Index y0 = static_cast<Index>(fy);
      const Index y1 = std::min(y0 + 1, mask.height - 1);
      const double ty = fy - y0;
      for (Index i = 0; i < out_w; ++i) {
        double fx = (i + 0.5) * sx - 0.5;
        fx = std::max(0.0, std::min(fx, static_cast<double>(mask.width - 1)));
        const Index x0 = static_cast<Index>(fx);
        const Index x1 = std::min(x0 + 1, mask.width - 1);
        const double tx = fx - x0;
        const double v = (1 - ty) * ((1 - tx) * mask.at(y0, x0) + tx * mask.at(y0, x1)) +
                         ty * ((1 - tx) * mask.at(y1, x0) + tx * mask.at(y1, x1));
        out.at(j, i) = v >= 0.5 ? 1 : 0;
      }
    }
  }
  return out;
}

BinaryMask segment_hand_full(const DepthMap& depth, const SegmentationParams& params) {
  ThresholdResult thresholded;
  try {
    thresholded = threshold_depth(depth, params);
  } catch (const Error& e) {
    throw Error(std::string("segment_hand: threshold stage: ") + e.what());
  }

  BinaryMask mask = dilate(thresholded.mask);
  mask = fill_holes(mask);

  if (mask.at(thresholded.seed_y, thresholded.seed_x)) {
    mask = largest_component_containing(mask, thresholded.seed_y, thresholded.seed_x);
  } else {
    // Cannot happen with grow-only morphology, but keep the documented fallback.
    std::cerr << "segment_hand: warning: min-depth seed lost during morphology, "
                 "falling back to the globally largest component\n";
    mask = largest_component(mask);
    if (mask.foreground_count() == 0)
      throw Error("segment_hand: component stage: no foreground component");
  }
  return mask;
}

BinaryMask segment_hand(const DepthMap& depth, const SegmentationParams& params) {
  return resize_mask(segment_hand_full(depth, params), 50, 50);
}

}  // namespace hgr
