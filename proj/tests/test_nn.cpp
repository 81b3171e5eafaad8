#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hgr/nn.hpp"
#include "hgr/rng.hpp"

using namespace hgr;

namespace {

// Independent reference: direct-loop valid cross-correlation. Kept free of the
// im2col/GEMM path that conv2d_forward uses.
template <typename Scalar>
Tensor<Scalar> conv2d_reference(const Tensor<Scalar>& in, const Tensor<Scalar>& w,
                                const VecX<Scalar>& b) {
  const Index oh = in.height() - w.height() + 1;
  const Index ow = in.width() - w.width() + 1;
  Tensor<Scalar> out(oh, ow, w.count(), in.count());
  for (Index n = 0; n < in.count(); ++n)
    for (Index k = 0; k < w.count(); ++k)
      for (Index oy = 0; oy < oh; ++oy)
        for (Index ox = 0; ox < ow; ++ox) {
          Scalar acc = b[k];
          for (Index dy = 0; dy < w.height(); ++dy)
            for (Index dx = 0; dx < w.width(); ++dx)
              for (Index c = 0; c < w.channels(); ++c)
                acc += in(oy + dy, ox + dx, c, n) * w(dy, dx, c, k);
          out(oy, ox, k, n) = acc;
        }
  return out;
}

template <typename Scalar>
Tensor<Scalar> random_tensor(Index h, Index w, Index c, Index n, Rng& rng) {
  Tensor<Scalar> t(h, w, c, n);
  auto v = t.vec();
  for (Index i = 0; i < v.size(); ++i) v[i] = static_cast<Scalar>(rng.uniform(-1.0, 1.0));
  return t;
}

}  // namespace

TEST_CASE("conv2d valid dimensions: 50x50x1 with 50 5x5 kernels") {
  Tensor<float> in(50, 50, 1, 1);
  Tensor<float> w(5, 5, 1, 50);
  VecX<float> b = VecX<float>::Zero(50);
  auto out = conv2d_forward(in, w, b);
  CHECK(out.height() == 46);
  CHECK(out.width() == 46);
  CHECK(out.channels() == 50);
}

TEST_CASE("conv2d zero kernel gives constant bias output") {
  Rng rng(7);
  auto in = random_tensor<float>(9, 8, 3, 2, rng);
  Tensor<float> w(3, 3, 3, 4);
  VecX<float> b(4);
  b << 1.5f, -2.f, 0.f, 3.f;
  auto out = conv2d_forward(in, w, b);
  for (Index n = 0; n < 2; ++n)
    for (Index y = 0; y < out.height(); ++y)
      for (Index x = 0; x < out.width(); ++x)
        for (Index k = 0; k < 4; ++k) CHECK(out(y, x, k, n) == b[k]);
}

TEST_CASE("conv2d 2x2 hand example") {
  Tensor<float> in(2, 2);
  in(0, 0) = 1;
  in(0, 1) = 2;
  in(1, 0) = 3;
  in(1, 1) = 4;
  Tensor<float> w(2, 2, 1, 1);
  w(0, 0) = 1;
  w(0, 1) = -1;
  w(1, 0) = -1;
  w(1, 1) = 1;
  VecX<float> b = VecX<float>::Zero(1);
  auto out = conv2d_forward(in, w, b);
  CHECK(out.size() == 1);
  CHECK(out(0, 0) == doctest::Approx(1 - 2 - 3 + 4));
}

TEST_CASE("conv2d matches direct-loop reference on random cases") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const Index kh = rng.range(1, 4), kw = rng.range(1, 4);
    const Index h = kh + rng.range(0, 6), w = kw + rng.range(0, 6);
    const Index c = rng.range(1, 4), k = rng.range(1, 5), n = rng.range(1, 3);
    auto in = random_tensor<double>(h, w, c, n, rng);
    auto wt = random_tensor<double>(kh, kw, c, k, rng);
    VecX<double> b(k);
    for (Index i = 0; i < k; ++i) b[i] = rng.uniform(-1, 1);
    auto got = conv2d_forward(in, wt, b);
    auto want = conv2d_reference(in, wt, b);
    CHECK((got.vec() - want.vec()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("conv2d shape errors") {
  Tensor<float> in(4, 4, 2);
  Tensor<float> w(3, 3, 3, 1);  // channel mismatch
  VecX<float> b = VecX<float>::Zero(1);
  CHECK_THROWS_AS(conv2d_forward(in, w, b), Error);
  Tensor<float> w2(5, 5, 2, 1);  // kernel larger than input
  CHECK_THROWS_AS(conv2d_forward(in, w2, b), Error);
}

TEST_CASE("maxpool canonical dimensions") {
  Tensor<float> a(46, 46, 50);
  auto p1 = maxpool_forward(a, 2, 2);
  CHECK(p1.height() == 23);
  CHECK(p1.width() == 23);
  CHECK(p1.channels() == 50);
  Tensor<float> c(21, 21, 20);
  auto p2 = maxpool_forward(c, 3, 3);
  CHECK(p2.height() == 7);
  CHECK(p2.width() == 7);
  CHECK(p2.channels() == 20);
}

TEST_CASE("maxpool of constant input is constant") {
  auto in = Tensor<float>::constant(6, 6, 3, 2, 2.5f);
  auto out = maxpool_forward(in, 2, 2);
  CHECK(out.vec().minCoeff() == 2.5f);
  CHECK(out.vec().maxCoeff() == 2.5f);
}

TEST_CASE("maxpool rejects non-divisible dims") {
  Tensor<float> in(7, 7, 1);
  CHECK_THROWS_AS(maxpool_forward(in, 2, 2), Error);
}

TEST_CASE("maxpool picks window maxima") {
  Tensor<float> in(4, 4);
  float v = 0;
  for (Index y = 0; y < 4; ++y)
    for (Index x = 0; x < 4; ++x) in(y, x) = v++;
  auto out = maxpool_forward(in, 2, 2);
  CHECK(out(0, 0) == 5.f);
  CHECK(out(0, 1) == 7.f);
  CHECK(out(1, 0) == 13.f);
  CHECK(out(1, 1) == 15.f);
}

TEST_CASE("fc identity weights reproduce input") {
  Tensor<float> in(1, 1, 3);
  in(0, 0, 0) = 1.f;
  in(0, 0, 1) = -2.f;
  in(0, 0, 2) = 3.f;
  Tensor<float> w(1, 1, 3, 3);
  for (Index i = 0; i < 3; ++i) w(0, 0, i, i) = 1.f;
  auto out = fc_forward(in, w, VecX<float>(VecX<float>::Zero(3)));
  CHECK(out.slice_vec(0)[0] == 1.f);
  CHECK(out.slice_vec(0)[1] == -2.f);
  CHECK(out.slice_vec(0)[2] == 3.f);
}

TEST_CASE("fc zero input yields bias") {
  Tensor<float> in(1, 1, 4);
  Tensor<float> w(1, 1, 4, 2);
  w.vec().setConstant(0.3f);
  VecX<float> b(2);
  b << 0.7f, -0.1f;
  auto out = fc_forward(in, w, b);
  CHECK(out.slice_vec(0)[0] == 0.7f);
  CHECK(out.slice_vec(0)[1] == -0.1f);
}

TEST_CASE("fc dimension checks") {
  Tensor<float> in(7, 7, 20);
  Tensor<float> w(1, 1, 980, 50);
  auto out = fc_forward(in, w, VecX<float>(VecX<float>::Zero(50)));
  CHECK(out.slice_size() == 50);
  Tensor<float> bad(1, 1, 979, 50);
  CHECK_THROWS_AS(fc_forward(in, bad, VecX<float>(VecX<float>::Zero(50))), Error);
}

TEST_CASE("softmax cross entropy: uniform logits") {
  VecX<double> logits = VecX<double>::Constant(10, 3.7);
  auto r = softmax_cross_entropy(logits, 4);
  for (Index i = 0; i < 10; ++i) CHECK(r.probabilities[i] == doctest::Approx(0.1));
  CHECK(r.loss == doctest::Approx(std::log(10.0)));
}

TEST_CASE("softmax cross entropy: large logit stays finite") {
  VecX<double> logits = VecX<double>::Zero(10);
  logits[0] = 1000.0;
  auto r = softmax_cross_entropy(logits, 0);
  CHECK(std::isfinite(r.loss));
  CHECK(r.loss == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.probabilities.allFinite());
}

TEST_CASE("softmax cross entropy: direct formula") {
  VecX<double> logits(3);
  logits << 1, 2, 3;
  auto r = softmax_cross_entropy(logits, 2);
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  CHECK(r.probabilities[0] == doctest::Approx(std::exp(1.0) / z));
  CHECK(r.probabilities[2] == doctest::Approx(std::exp(3.0) / z));
  CHECK(r.loss == doctest::Approx(-std::log(std::exp(3.0) / z)));
}

TEST_CASE("softmax properties: normalization and shift invariance") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    VecX<double> logits(10);
    for (Index i = 0; i < 10; ++i) logits[i] = rng.uniform(-5, 5);
    auto p = softmax(logits);
    CHECK(std::abs(p.sum() - 1.0) < 1e-6);
    VecX<double> shifted = logits.array() + rng.uniform(-100, 100);
    auto p2 = softmax(shifted);
    CHECK((p - p2).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("softmax cross entropy rejects out-of-range label") {
  VecX<double> logits = VecX<double>::Zero(10);
  CHECK_THROWS_AS(softmax_cross_entropy(logits, 10), Error);
  CHECK_THROWS_AS(softmax_cross_entropy(logits, -1), Error);
}
