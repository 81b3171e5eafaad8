#pragma once

#include "hgr/image.hpp"

namespace hgr {

struct SegmentationParams {
  int depth_alpha = 3;  // depth tolerance above the minimum; >= 0
  // the dilation structuring element is a fixed 3x3 square
};

struct ThresholdResult {
  BinaryMask mask;
  std::uint16_t min_depth = 0;
  Index seed_y = 0, seed_x = 0;  // first pixel (row-major) attaining min_depth
};

// Marks pixels with 0 < depth <= m + depth_alpha, where m is the minimum
// nonzero depth. Zero (occluded) pixels are never foreground.
ThresholdResult threshold_depth(const DepthMap& depth, const SegmentationParams& params);

// 3x3 square dilation; out-of-range neighbors count as background.
BinaryMask dilate(const BinaryMask& mask);

// Sets to foreground every background region (4-connected) that cannot reach
// the image border.
BinaryMask fill_holes(const BinaryMask& mask);

// Keeps exactly the 8-connected foreground component containing the seed.
// Rejects a background seed.
BinaryMask largest_component_containing(const BinaryMask& mask, Index seed_y, Index seed_x);

// Globally largest 8-connected foreground component (first in row-major order
// on ties); the pipeline's fallback when the seed is not foreground.
BinaryMask largest_component(const BinaryMask& mask);

// Box-average downsample (or bilinear upsample) to out_h x out_w, then
// threshold at 0.5.
BinaryMask resize_mask(const BinaryMask& mask, Index out_h = 50, Index out_w = 50);

// Full pipeline up to (but not including) the 50x50 resize; this is the mask
// rotation augmentation operates on.
BinaryMask segment_hand_full(const DepthMap& depth, const SegmentationParams& params);

// threshold -> dilate -> fill holes -> seed component -> resize to 50x50.
BinaryMask segment_hand(const DepthMap& depth, const SegmentationParams& params);

}  // namespace hgr
