#pragma once

#include <filesystem>

#include "hgr/image.hpp"

namespace hgr {

// Binary PGM ("P5"). Depth maps are written with maxval 65535, 16-bit
// big-endian samples; 8-bit files (maxval <= 255) are accepted on read.
DepthMap read_depth_pgm(const std::filesystem::path& path);
void write_depth_pgm(const std::filesystem::path& path, const DepthMap& depth);

// Masks: PGM "P5" maxval 255 with values {0, 255}, or portable bitmap "P4".
// Reads accept either; any nonzero PGM sample counts as foreground.
BinaryMask read_mask(const std::filesystem::path& path);
void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask);
void write_mask_pbm(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace hgr
