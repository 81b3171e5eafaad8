#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hgr/tensor.hpp"

using hgr::Index;
using hgr::Tensor;

TEST_CASE("shape and flat layout") {
  Tensor<float> t(2, 3, 4, 5);
  CHECK(t.size() == 2 * 3 * 4 * 5);
  CHECK(t.slice_size() == 24);
  CHECK(t.shape_str() == "2x3x4x5");

  // channel fastest within a slice, slices contiguous
  t(0, 0, 0, 0) = 1.f;
  t(0, 0, 1, 0) = 2.f;
  t(0, 1, 0, 0) = 3.f;
  t(1, 0, 0, 0) = 4.f;
  t(0, 0, 0, 1) = 5.f;
  const float* d = t.data();
  CHECK(d[0] == 1.f);
  CHECK(d[1] == 2.f);
  CHECK(d[4] == 3.f);
  CHECK(d[12] == 4.f);
  CHECK(d[24] == 5.f);
}

TEST_CASE("rows view maps slices to matrix rows") {
  Tensor<double> t(1, 2, 2, 3);
  for (Index n = 0; n < 3; ++n)
    for (Index i = 0; i < 4; ++i) t.slice(n)[i] = static_cast<double>(10 * n + i);
  auto m = t.rows();
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 4);
  CHECK(m(1, 2) == 12.0);
  CHECK(m(2, 0) == 20.0);
}

TEST_CASE("zero initialized and finite") {
  Tensor<float> t(4, 4, 2);
  CHECK(t.vec().sum() == 0.f);
  CHECK(t.all_finite());
  t(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("invalid dimensions rejected") {
  CHECK_THROWS_AS(Tensor<float>(0, 3), hgr::Error);
  CHECK_THROWS_AS(Tensor<float>(3, -1), hgr::Error);
}

TEST_CASE("cast preserves layout") {
  Tensor<float> t(2, 2);
  t(0, 1) = 1.5f;
  auto d = t.cast<double>();
  CHECK(d(0, 1) == 1.5);
  CHECK(d.shape() == t.shape());
}
