#pragma once

#include <cstdint>
#include <filesystem>

#include "hgr/dataset.hpp"

namespace hgr {

// Parametric depth-scene generator. Class k renders a palm ellipse with k
// finger bars fanned at class-specific angles; the hand sits at depth 40
// (+-2 per-pixel jitter) in front of a body plane at depth 80, with scattered
// occluded (zero) pixels on the background. Per-person geometry jitter:
// scale +-10%, small translation, base rotation +-10 degrees; repetitions add
// a little extra translation/rotation. Everything derives deterministically
// from the seed.
struct SynthConfig {
  int classes = 10;
  int persons = 14;
  int repetitions = 10;
  Index image_h = 128;
  Index image_w = 128;
  std::filesystem::path out_dir;
};

// Hand placement for one (person, repetition); exposed so tests can reason
// about the rendered geometry.
struct HandPose {
  double cx, cy;       // palm center, pixels
  double angle_deg;    // hand rotation
  double scale;        // geometry multiplier
};

HandPose synth_pose(const SynthConfig& config, std::uint64_t seed, int person,
                    int repetition);

DepthMap synth_depth_frame(const SynthConfig& config, std::uint64_t seed, int person,
                           int gesture, int repetition);

// Writes depth/pNN_gKK_rMM.pgm files plus dataset.csv under config.out_dir and
// returns the manifest rows. Byte-for-byte reproducible per seed.
std::vector<Sample> synth_generate(const SynthConfig& config, std::uint64_t seed,
                                   int threads = 1);

// Base geometry constants (pre-scale), shared with tests.
namespace synth_geometry {
inline constexpr double kPalmSemiAxisX = 16.0;
inline constexpr double kPalmSemiAxisY = 20.0;
inline constexpr double kFingerWidth = 4.0;
inline constexpr double kFingerInnerRadius = 16.0;
inline constexpr double kFingerLength = 30.0;
inline constexpr double kFingerGapDeg = 16.0;
inline constexpr int kHandDepth = 40;
inline constexpr int kBodyDepth = 80;
}  // namespace synth_geometry

}  // namespace hgr
