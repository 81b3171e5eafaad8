#include "hgr/synth.hpp"

#include <cmath>
#include <cstdio>

#include "hgr/parallel.hpp"
#include "hgr/pgm.hpp"
#include "hgr/rng.hpp"

namespace hgr {

namespace geo = synth_geometry;

namespace {

struct PersonJitter {
  double scale, base_angle, tx, ty;
};

PersonJitter person_jitter(std::uint64_t seed, int person) {
  Rng rng(derive_seed(seed, 0x9e450, static_cast<std::uint64_t>(person)));
  PersonJitter j;
  j.scale = rng.uniform(0.9, 1.1);
  j.base_angle = rng.uniform(-10.0, 10.0);
  j.tx = rng.uniform(-6.0, 6.0);
  j.ty = rng.uniform(-6.0, 6.0);
  return j;
}

}  // namespace

HandPose synth_pose(const SynthConfig& config, std::uint64_t seed, int person,
                    int repetition) {
  const PersonJitter pj = person_jitter(seed, person);
  Rng rng(derive_seed(seed, 0x4e9, static_cast<std::uint64_t>(person),
                      static_cast<std::uint64_t>(repetition)));
  HandPose pose;
  const double size_factor =
      static_cast<double>(std::min(config.image_h, config.image_w)) / 128.0;
  pose.scale = pj.scale * size_factor;
  pose.angle_deg = pj.base_angle + rng.uniform(-5.0, 5.0);
  pose.cx = static_cast<double>(config.image_w) / 2.0 + (pj.tx + rng.uniform(-4.0, 4.0)) * size_factor;
  pose.cy = static_cast<double>(config.image_h) * 0.56 + (pj.ty + rng.uniform(-4.0, 4.0)) * size_factor;
  return pose;
}

DepthMap synth_depth_frame(const SynthConfig& config, std::uint64_t seed, int person,
                           int gesture, int repetition) {
  require(gesture >= 0 && gesture < config.classes, "synth: gesture out of range");
  const HandPose pose = synth_pose(config, seed, person, repetition);
  Rng rng(derive_seed(seed, 0xdeb7, static_cast<std::uint64_t>(person),
                      static_cast<std::uint64_t>(gesture * 1000 + repetition)));

  const double rad = pose.angle_deg * M_PI / 180.0;
  const double cos_a = std::cos(rad), sin_a = std::sin(rad);
  const int fingers = gesture;  // class k shows k fingers
  const double spread = geo::kFingerGapDeg * std::max(0, fingers - 1);

  auto hand_hit = [&](Index py, Index px) {
    // into the hand frame: translate, rotate back, unscale
    const double dx = (static_cast<double>(px) - pose.cx);
    const double dy = (static_cast<double>(py) - pose.cy);
    const double hx = (cos_a * dx + sin_a * dy) / pose.scale;
    const double hy = (-sin_a * dx + cos_a * dy) / pose.scale;

    const double ex = hx / geo::kPalmSemiAxisX;
    const double ey = hy / geo::kPalmSemiAxisY;
    if (ex * ex + ey * ey <= 1.0) return true;

    for (int f = 0; f < fingers; ++f) {
      const double theta =
          (fingers == 1 ? 0.0 : -spread / 2.0 + f * geo::kFingerGapDeg) * M_PI / 180.0;
      // finger frame: +up is the finger axis
      const double fx = std::cos(theta) * hx - std::sin(theta) * hy;
      const double fy = std::sin(theta) * hx + std::cos(theta) * hy;
      if (std::abs(fx) <= geo::kFingerWidth / 2.0 && -fy >= geo::kFingerInnerRadius &&
          -fy <= geo::kFingerInnerRadius + geo::kFingerLength)
        return true;
    }
    return false;
  };

  DepthMap d(config.image_h, config.image_w);
  for (Index y = 0; y < config.image_h; ++y)
    for (Index x = 0; x < config.image_w; ++x) {
      if (hand_hit(y, x)) {
        d.at(y, x) = static_cast<std::uint16_t>(geo::kHandDepth + rng.range(-2, 2));
      } else {
        // body plane with ~1% occluded pixels
        d.at(y, x) = rng.uniform() < 0.01 ? 0 : static_cast<std::uint16_t>(geo::kBodyDepth);
      }
    }
  return d;
}

std::vector<Sample> synth_generate(const SynthConfig& config, std::uint64_t seed,
                                   int threads) {
  require(config.classes >= 1 && config.classes <= kNumGestures,
          "synth: classes must be in [1, 10]");
  require(config.persons >= 1 && config.repetitions >= 1, "synth: empty dataset");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir / "depth", ec);
  if (ec || !fs::is_directory(config.out_dir / "depth"))
    throw Error("synth: cannot create output directory " + config.out_dir.string());

  std::vector<Sample> samples;
  for (int person = 1; person <= config.persons; ++person)
    for (int gesture = 0; gesture < config.classes; ++gesture)
      for (int rep = 1; rep <= config.repetitions; ++rep) {
        char name[48];
        std::snprintf(name, sizeof name, "depth/p%02d_g%02d_r%02d.pgm", person, gesture,
                      rep);
        Sample s;
        s.person_id = person;
        s.gesture = gesture;
        s.repetition = rep;
        s.depth_path = fs::path(name);
        samples.push_back(std::move(s));
      }

  parallel_for(static_cast<Index>(samples.size()), threads, [&](Index i) {
    const Sample& s = samples[static_cast<std::size_t>(i)];
    const DepthMap d =
        synth_depth_frame(config, seed, s.person_id, s.gesture, s.repetition);
    write_depth_pgm(config.out_dir / s.depth_path, d);
  });

  write_manifest(config.out_dir / "dataset.csv", samples);
  // reload-style resolution: paths relative to the manifest directory
  for (auto& s : samples) s.depth_path = config.out_dir / s.depth_path;
  return samples;
}

}  // namespace hgr
