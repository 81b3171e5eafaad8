#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hgr/image.hpp"
#include "hgr/segmentation.hpp"

namespace hgr {

inline constexpr int kNumGestures = 10;
inline constexpr std::array<int, 9> kRotationAngles{-20, -15, -10, -5, 0, 5, 10, 15, 20};

struct Sample {
  int person_id = 0;    // 1-based
  int gesture = 0;      // 0..9
  int repetition = 0;   // 1-based
  std::filesystem::path depth_path;
  int rotation_deg = 0;  // 0 for originals
};

// Manifest CSV: header "person,gesture,repetition,depth_path", one original
// sample per row. Relative depth paths resolve against the manifest directory;
// every referenced file must exist.
std::vector<Sample> load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<Sample>& samples);

// All 9 rotations of a full-resolution (pre-resize) mask, in kRotationAngles
// order; the 0 degree entry is the original.
std::array<BinaryMask, 9> augment_rotations(const BinaryMask& mask);

// Expands originals by the rotation set: one Sample per (original, angle).
std::vector<Sample> expand_augmentations(const std::vector<Sample>& originals);

// Person-disjoint partition into 4 groups, sized as evenly as possible
// ({4,4,3,3} for 14 persons).
struct FoldPlan {
  std::vector<std::vector<int>> groups;

  int group_of(int person_id) const;
  bool is_test(int fold, int person_id) const { return group_of(person_id) == fold; }
};

FoldPlan make_folds(std::vector<int> persons, std::uint64_t seed);

// A sample ready for the network: the 9 rotated 50x50 masks plus its labels.
struct LoadedSample {
  int person_id = 0;
  int gesture = 0;
  std::array<BinaryMask, 9> masks;  // rotated, resized to 50x50
};

struct LoadedDataset {
  std::vector<LoadedSample> samples;

  std::vector<int> person_ids() const;  // sorted, unique
};

// Segments every manifest original, augments, and resizes; parallel across
// samples. max_samples = 0 loads everything.
LoadedDataset load_dataset(const std::vector<Sample>& originals,
                           const SegmentationParams& params, int threads,
                           std::size_t max_samples = 0);

}  // namespace hgr
