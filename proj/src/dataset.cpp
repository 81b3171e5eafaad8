#include "hgr/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "hgr/parallel.hpp"
#include "hgr/pgm.hpp"
#include "hgr/rng.hpp"

namespace hgr {

namespace {

int parse_int_field(const std::string& field, const std::string& name, std::size_t row) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(field, &pos);
    require(pos == field.size(), "");
    return v;
  } catch (...) {
    throw Error("manifest row " + std::to_string(row) + ": invalid " + name + " '" +
                field + "'");
  }
}

}  // namespace

std::vector<Sample> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_manifest: cannot open " + path.string());
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  std::vector<Sample> samples;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      require(line == "person,gesture,repetition,depth_path",
              "load_manifest: bad header in " + path.string());
      header_seen = true;
      continue;
    }

    std::stringstream ss(line);
    std::string person, gesture, repetition, depth_path;
    if (!std::getline(ss, person, ',') || !std::getline(ss, gesture, ',') ||
        !std::getline(ss, repetition, ',') || !std::getline(ss, depth_path))
      throw Error("manifest row " + std::to_string(row) + ": expected 4 fields");

    Sample s;
    s.person_id = parse_int_field(person, "person", row);
    s.gesture = parse_int_field(gesture, "gesture", row);
    s.repetition = parse_int_field(repetition, "repetition", row);
    require(s.person_id >= 1,
            "manifest row " + std::to_string(row) + ": person must be >= 1");
    require(s.gesture >= 0 && s.gesture < kNumGestures,
            "manifest row " + std::to_string(row) + ": gesture " +
                std::to_string(s.gesture) + " out of range [0, 10)");
    require(s.repetition >= 1,
            "manifest row " + std::to_string(row) + ": repetition must be >= 1");
    std::filesystem::path p(depth_path);
    s.depth_path = p.is_absolute() ? p : base / p;
    require(std::filesystem::exists(s.depth_path),
            "manifest row " + std::to_string(row) + ": missing depth file " +
                s.depth_path.string());
    samples.push_back(std::move(s));
  }
  if (samples.empty())
    std::cerr << "load_manifest: warning: " << path.string() << " lists no samples\n";
  return samples;
}

void write_manifest(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw Error("write_manifest: cannot write " + path.string());
  out << "person,gesture,repetition,depth_path\n";
  for (const auto& s : samples)
    out << s.person_id << "," << s.gesture << "," << s.repetition << ","
        << s.depth_path.generic_string() << "\n";
  if (!out) throw Error("write_manifest: failed writing " + path.string());
}

std::array<BinaryMask, 9> augment_rotations(const BinaryMask& mask) {
  std::array<BinaryMask, 9> out;
  for (std::size_t i = 0; i < kRotationAngles.size(); ++i)
    out[i] = rotate_mask(mask, kRotationAngles[i]);
  return out;
}

std::vector<Sample> expand_augmentations(const std::vector<Sample>& originals) {
  std::vector<Sample> expanded;
  expanded.reserve(originals.size() * kRotationAngles.size());
  for (const auto& s : originals)
    for (int angle : kRotationAngles) {
      Sample a = s;
      a.rotation_deg = angle;
      expanded.push_back(std::move(a));
    }
  return expanded;
}

int FoldPlan::group_of(int person_id) const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int p : groups[g])
      if (p == person_id) return static_cast<int>(g);
  throw Error("FoldPlan: person " + std::to_string(person_id) + " not in any group");
}

FoldPlan make_folds(std::vector<int> persons, std::uint64_t seed) {
  std::sort(persons.begin(), persons.end());
  persons.erase(std::unique(persons.begin(), persons.end()), persons.end());
  require(persons.size() >= 4, "make_folds: need at least 4 persons, got " +
                                   std::to_string(persons.size()));
  Rng rng(derive_seed(seed, 0xf01d5));
  rng.shuffle(persons);

  FoldPlan plan;
  plan.groups.resize(4);
  for (std::size_t i = 0; i < persons.size(); ++i)
    plan.groups[i % 4].push_back(persons[i]);
  for (auto& g : plan.groups) std::sort(g.begin(), g.end());
  return plan;
}

std::vector<int> LoadedDataset::person_ids() const {
  std::set<int> ids;
  for (const auto& s : samples) ids.insert(s.person_id);
  return {ids.begin(), ids.end()};
}

LoadedDataset load_dataset(const std::vector<Sample>& originals,
                           const SegmentationParams& params, int threads,
                           std::size_t max_samples) {
  const std::size_t n = max_samples == 0 ? originals.size()
                                         : std::min(max_samples, originals.size());
  LoadedDataset ds;
  ds.samples.resize(n);
  parallel_for(static_cast<Index>(n), threads, [&](Index i) {
    const Sample& s = originals[static_cast<std::size_t>(i)];
    const DepthMap depth = read_depth_pgm(s.depth_path);
    const BinaryMask full = segment_hand_full(depth, params);
    LoadedSample& out = ds.samples[static_cast<std::size_t>(i)];
    out.person_id = s.person_id;
    out.gesture = s.gesture;
    const auto rotations = augment_rotations(full);
    for (std::size_t r = 0; r < rotations.size(); ++r)
      out.masks[r] = resize_mask(rotations[r], 50, 50);
  });
  return ds;
}

}  // namespace hgr
