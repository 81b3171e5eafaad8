#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "hgr/pgm.hpp"
#include "hgr/rng.hpp"
#include "hgr/segmentation.hpp"

using namespace hgr;

namespace {

BinaryMask random_mask(Index h, Index w, double density, Rng& rng) {
  BinaryMask m(h, w);
  for (auto& v : m.values) v = rng.uniform() < density ? 1 : 0;
  return m;
}

bool subset_of(const BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (a.values[i] && !b.values[i]) return false;
  return true;
}

std::filesystem::path golden_dir() {
  return std::filesystem::path(HGR_TEST_DATA_DIR) / "golden";
}

}  // namespace

TEST_CASE("threshold_depth worked example") {
  DepthMap d(3, 3);
  const std::uint16_t rows[3][3] = {{0, 5, 6}, {4, 4, 9}, {8, 9, 9}};
  for (Index y = 0; y < 3; ++y)
    for (Index x = 0; x < 3; ++x) d.at(y, x) = rows[y][x];

  auto r = threshold_depth(d, SegmentationParams{3});
  CHECK(r.min_depth == 4);
  CHECK(r.seed_y == 1);
  CHECK(r.seed_x == 0);
  const std::uint8_t want[3][3] = {{0, 1, 1}, {1, 1, 0}, {0, 0, 0}};
  for (Index y = 0; y < 3; ++y)
    for (Index x = 0; x < 3; ++x) CHECK(r.mask.at(y, x) == want[y][x]);
}

TEST_CASE("threshold_depth constant map marks everything") {
  DepthMap d(4, 5);
  for (auto& v : d.values) v = 7;
  auto r = threshold_depth(d, SegmentationParams{3});
  CHECK(r.mask.foreground_count() == 20);
}

TEST_CASE("threshold_depth alpha zero keeps only the minimum") {
  DepthMap d(2, 3);
  const std::uint16_t vals[] = {9, 4, 5, 4, 6, 7};
  for (std::size_t i = 0; i < 6; ++i) d.values[i] = vals[i];
  auto r = threshold_depth(d, SegmentationParams{0});
  CHECK(r.mask.foreground_count() == 2);
  CHECK(r.mask.values[1] == 1);
  CHECK(r.mask.values[3] == 1);
}

TEST_CASE("threshold_depth rejects all-zero map") {
  DepthMap d(4, 4);
  CHECK_THROWS_AS(threshold_depth(d, SegmentationParams{3}), Error);
}

TEST_CASE("threshold monotone in depth_alpha") {
  Rng rng(60);
  DepthMap d(20, 20);
  for (auto& v : d.values) v = static_cast<std::uint16_t>(rng.range(0, 15));
  d.at(10, 10) = 1;  // ensure nonzero
  BinaryMask prev(20, 20);
  for (int alpha = 0; alpha <= 15; ++alpha) {
    auto r = threshold_depth(d, SegmentationParams{alpha});
    CHECK(subset_of(prev, r.mask));
    prev = r.mask;
  }
}

TEST_CASE("dilate single center pixel into 3x3 block") {
  BinaryMask m(5, 5);
  m.at(2, 2) = 1;
  auto out = dilate(m);
  CHECK(out.foreground_count() == 9);
  for (Index y = 1; y <= 3; ++y)
    for (Index x = 1; x <= 3; ++x) CHECK(out.at(y, x) == 1);
}

TEST_CASE("dilate of empty mask is empty") {
  BinaryMask m(6, 7);
  CHECK(dilate(m).foreground_count() == 0);
}

TEST_CASE("dilate is monotone") {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    auto b = random_mask(15, 15, 0.3, rng);
    auto a = b;
    for (auto& v : a.values)  // a is a random subset of b
      if (v && rng.uniform() < 0.5) v = 0;
    CHECK(subset_of(dilate(a), dilate(b)));
  }
}

TEST_CASE("fill_holes fills a ring") {
  BinaryMask m(9, 9);
  for (Index y = 2; y <= 6; ++y)
    for (Index x = 2; x <= 6; ++x)
      if (y == 2 || y == 6 || x == 2 || x == 6) m.at(y, x) = 1;
  auto out = fill_holes(m);
  for (Index y = 2; y <= 6; ++y)
    for (Index x = 2; x <= 6; ++x) CHECK(out.at(y, x) == 1);
  CHECK(out.foreground_count() == 25);
}

TEST_CASE("fill_holes leaves border-open concavity alone") {
  // C shape opening to the right border
  BinaryMask m(7, 7);
  for (Index y = 1; y <= 5; ++y) m.at(y, 1) = 1;
  for (Index x = 1; x <= 5; ++x) {
    m.at(1, x) = 1;
    m.at(5, x) = 1;
  }
  auto out = fill_holes(m);
  CHECK(out == m);
}

TEST_CASE("fill_holes is idempotent") {
  Rng rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_mask(12, 12, 0.45, rng);
    auto once = fill_holes(m);
    CHECK(fill_holes(once) == once);
  }
}

TEST_CASE("largest_component_containing keeps the seed blob") {
  BinaryMask m(10, 10);
  for (Index y = 1; y <= 2; ++y)
    for (Index x = 1; x <= 2; ++x) m.at(y, x) = 1;  // small seed blob
  for (Index y = 5; y <= 9; ++y)
    for (Index x = 5; x <= 9; ++x) m.at(y, x) = 1;  // bigger blob
  auto out = largest_component_containing(m, 1, 1);
  CHECK(out.foreground_count() == 4);
  CHECK(out.at(1, 1) == 1);
  CHECK(out.at(7, 7) == 0);
}

TEST_CASE("largest_component_containing single blob unchanged") {
  BinaryMask m(6, 6);
  for (Index y = 2; y <= 4; ++y)
    for (Index x = 1; x <= 3; ++x) m.at(y, x) = 1;
  CHECK(largest_component_containing(m, 3, 2) == m);
}

TEST_CASE("largest_component_containing uses 8-connectivity") {
  BinaryMask m(4, 4);
  m.at(0, 0) = 1;
  m.at(1, 1) = 1;  // diagonal neighbor
  auto out = largest_component_containing(m, 0, 0);
  CHECK(out.foreground_count() == 2);
}

TEST_CASE("largest_component_containing rejects background seed") {
  BinaryMask m(4, 4);
  m.at(0, 0) = 1;
  CHECK_THROWS_AS(largest_component_containing(m, 2, 2), Error);
}

TEST_CASE("resize: constant and identity") {
  BinaryMask ones(100, 100);
  for (auto& v : ones.values) v = 1;
  auto out = resize_mask(ones);
  CHECK(out.height == 50);
  CHECK(out.width == 50);
  CHECK(out.foreground_count() == 2500);

  BinaryMask m(50, 50);
  m.at(10, 20) = 1;
  CHECK(resize_mask(m) == m);
}

TEST_CASE("resize: aligned half plane downsamples exactly") {
  BinaryMask m(100, 100);
  for (Index y = 0; y < 100; ++y)
    for (Index x = 0; x < 50; ++x) m.at(y, x) = 1;
  auto out = resize_mask(m);
  for (Index y = 0; y < 50; ++y)
    for (Index x = 0; x < 50; ++x) CHECK(out.at(y, x) == (x < 25 ? 1 : 0));
}

TEST_CASE("resize: upsample stays binary and covers the blob") {
  BinaryMask m(20, 20);
  for (Index y = 5; y < 15; ++y)
    for (Index x = 5; x < 15; ++x) m.at(y, x) = 1;
  auto out = resize_mask(m);
  CHECK(out.height == 50);
  CHECK(out.width == 50);
  for (auto v : out.values) CHECK((v == 0 || v == 1));
  CHECK(out.at(25, 25) == 1);
  CHECK(out.at(2, 2) == 0);
}

TEST_CASE("segment_hand: synthetic hand in front of body") {
  Rng rng(63);
  DepthMap d(60, 60);
  for (auto& v : d.values) v = 80;                      // body plane
  for (Index y = 20; y < 40; ++y)
    for (Index x = 15; x < 35; ++x)
      d.at(y, x) = static_cast<std::uint16_t>(40 + rng.range(-2, 2));  // hand
  auto mask = segment_hand(d, SegmentationParams{3});
  CHECK(mask.height == 50);
  CHECK(mask.width == 50);
  // hand occupies the center, body contributes nothing
  CHECK(mask.at(25, 20) == 1);
  CHECK(mask.at(2, 2) == 0);
  CHECK(mask.at(47, 47) == 0);
  for (auto v : mask.values) CHECK((v == 0 || v == 1));
}

TEST_CASE("segment_hand: all-zero frame fails with stage name") {
  DepthMap d(30, 30);
  try {
    segment_hand(d, SegmentationParams{3});
    FAIL("expected segmentation failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("threshold stage") != std::string::npos);
  }
}

TEST_CASE("segment_hand: min-depth pixel is foreground pre-resize") {
  Rng rng(64);
  for (int trial = 0; trial < 10; ++trial) {
    DepthMap d(40, 40);
    for (auto& v : d.values) v = static_cast<std::uint16_t>(rng.range(50, 90));
    const Index hy = rng.range(5, 30), hx = rng.range(5, 30);
    for (Index y = hy; y < hy + 8; ++y)
      for (Index x = hx; x < hx + 8; ++x)
        d.at(y, x) = static_cast<std::uint16_t>(rng.range(20, 23));
    auto r = threshold_depth(d, SegmentationParams{3});
    auto full = segment_hand_full(d, SegmentationParams{3});
    CHECK(full.at(r.seed_y, r.seed_x) == 1);
  }
}

TEST_CASE("segment_hand is deterministic") {
  Rng rng(65);
  DepthMap d(64, 48);
  for (auto& v : d.values) v = static_cast<std::uint16_t>(rng.range(0, 100));
  d.at(30, 20) = 10;
  auto a = segment_hand(d, SegmentationParams{3});
  auto b = segment_hand(d, SegmentationParams{3});
  CHECK(a == b);
}

TEST_CASE("dilate then fill contains the threshold mask") {
  Rng rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    DepthMap d(30, 30);
    for (auto& v : d.values) v = static_cast<std::uint16_t>(rng.range(1, 12));
    auto r = threshold_depth(d, SegmentationParams{2});
    auto morph = fill_holes(dilate(r.mask));
    CHECK(subset_of(r.mask, morph));
  }
}

TEST_CASE("golden corpus is reproduced bit-exactly") {
  const auto dir = golden_dir();
  REQUIRE(std::filesystem::exists(dir));
  for (int i = 0; i < 10; ++i) {
    char depth_name[32], mask_name[32];
    std::snprintf(depth_name, sizeof depth_name, "depth_%02d.pgm", i);
    std::snprintf(mask_name, sizeof mask_name, "mask_%02d.pgm", i);
    CAPTURE(i);
    auto depth = read_depth_pgm(dir / depth_name);
    auto want = read_mask(dir / mask_name);
    auto got = segment_hand(depth, SegmentationParams{3});
    CHECK(got == want);
  }
}

TEST_CASE("pgm round trips") {
  namespace fs = std::filesystem;
  const auto tmp = fs::temp_directory_path() / "hgr_pgm_test";
  fs::create_directories(tmp);

  Rng rng(67);
  DepthMap d(13, 17);
  for (auto& v : d.values) v = static_cast<std::uint16_t>(rng.range(0, 65535));
  write_depth_pgm(tmp / "d.pgm", d);
  auto d2 = read_depth_pgm(tmp / "d.pgm");
  CHECK(d2.values == d.values);
  CHECK(d2.width == 17);
  CHECK(d2.height == 13);

  auto m = random_mask(11, 19, 0.4, rng);
  write_mask_pgm(tmp / "m.pgm", m);
  CHECK(read_mask(tmp / "m.pgm") == m);
  write_mask_pbm(tmp / "m.pbm", m);
  CHECK(read_mask(tmp / "m.pbm") == m);

  fs::remove_all(tmp);
}

TEST_CASE("pgm rejects bad input") {
  namespace fs = std::filesystem;
  const auto tmp = fs::temp_directory_path() / "hgr_pgm_bad";
  fs::create_directories(tmp);
  {
    std::FILE* f = std::fopen((tmp / "bad.pgm").c_str(), "wb");
    std::fputs("P6\n2 2\n255\nxxxx", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_depth_pgm(tmp / "bad.pgm"), Error);
  CHECK_THROWS_AS(read_depth_pgm(tmp / "missing.pgm"), Error);
  {
    std::FILE* f = std::fopen((tmp / "trunc.pgm").c_str(), "wb");
    std::fputs("P5\n4 4\n65535\nxx", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_depth_pgm(tmp / "trunc.pgm"), Error);
  fs::remove_all(tmp);
}
