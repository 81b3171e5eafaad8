#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hgr/network.hpp"

using namespace hgr;

namespace {

// The reduced architecture used for gradient verification:
// 8x8x1 -> conv 2@3x3 -> relu -> pool 2/2 -> fc 3 -> softmax
Network<double> reduced_net(std::uint64_t seed) {
  Network<double> net;
  net.add(LayerSpec::conv(2, 3, 3, 1));
  net.add(LayerSpec::relu());
  net.add(LayerSpec::maxpool(2, 2));
  net.add(LayerSpec::fully_connected(18, 3));
  net.add(LayerSpec::softmax());
  Rng rng(seed);
  xavier_init(net, rng);
  return net;
}

double loss_of(const Network<double>& net, const Tensor<double>& input, Index label) {
  auto probs = net.forward(input);
  return -std::log(probs.slice_vec(0)[label]);
}

}  // namespace

TEST_CASE("canonical network shape trace and parameter counts") {
  auto net = canonical_gesture_network<float>();
  auto trace = net.shape_trace({50, 50, 1});
  // conv1 / relu / pool1 / conv2 / relu / pool2 / fc1 / relu / fc2 / softmax
  REQUIRE(trace.size() == 11);
  CHECK(trace[0] == std::array<Index, 3>{50, 50, 1});
  CHECK(trace[1] == std::array<Index, 3>{46, 46, 50});
  CHECK(trace[3] == std::array<Index, 3>{23, 23, 50});
  CHECK(trace[4] == std::array<Index, 3>{21, 21, 20});
  CHECK(trace[6] == std::array<Index, 3>{7, 7, 20});
  CHECK(trace[7] == std::array<Index, 3>{1, 1, 50});
  CHECK(trace[9] == std::array<Index, 3>{1, 1, 10});
  CHECK(trace[10] == std::array<Index, 3>{1, 1, 10});

  CHECK(net.weight_count() == 59750);
  CHECK(net.bias_count() == 130);
}

TEST_CASE("zero-parameter network outputs uniform probabilities") {
  auto net = canonical_gesture_network<float>();
  Tensor<float> mask(50, 50, 1, 1);
  auto probs = net.forward(mask);
  for (Index i = 0; i < 10; ++i) CHECK(probs.slice_vec(0)[i] == doctest::Approx(0.1f));
}

TEST_CASE("forward rejects wrong input shape") {
  auto net = canonical_gesture_network<float>();
  Tensor<float> bad(49, 50, 1, 1);
  CHECK_THROWS_AS(net.forward(bad), Error);
}

TEST_CASE("probabilities sum to one for random masks") {
  auto net = canonical_gesture_network<float>();
  Rng rng(3);
  xavier_init(net, rng);
  Tensor<float> mask(50, 50, 1, 2);
  for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < 0.3 ? 1.f : 0.f;
  auto probs = net.forward(mask);
  for (Index n = 0; n < 2; ++n)
    CHECK(std::abs(probs.slice_vec(n).sum() - 1.f) < 1e-6f);
}

TEST_CASE("backward matches central finite differences on the reduced net") {
  auto net = reduced_net(123);
  Rng rng(9);
  Tensor<double> input(8, 8, 1, 1);
  for (Index i = 0; i < input.size(); ++i) input.data()[i] = rng.uniform(-1, 1);
  const Index label = 1;

  auto grads = net.zero_gradients();
  auto trace = net.forward_trace(input);
  net.backward(trace, {label}, grads);

  const double h = 1e-5;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    if (!net.has_params(li)) continue;
    auto w = net.weights[li].vec();
    for (Index j = 0; j < w.size(); ++j) {
      const double orig = w[j];
      w[j] = orig + h;
      const double lp = loss_of(net, input, label);
      w[j] = orig - h;
      const double lm = loss_of(net, input, label);
      w[j] = orig;
      const double fd = (lp - lm) / (2 * h);
      const double an = grads.weights[li].vec()[j];
      const double rel = std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
      CHECK(rel < 1e-4);
    }
    for (Index j = 0; j < net.biases[li].size(); ++j) {
      const double orig = net.biases[li][j];
      net.biases[li][j] = orig + h;
      const double lp = loss_of(net, input, label);
      net.biases[li][j] = orig - h;
      const double lm = loss_of(net, input, label);
      net.biases[li][j] = orig;
      const double fd = (lp - lm) / (2 * h);
      const double an = grads.biases[li][j];
      const double rel = std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("backward without cached trace is rejected") {
  auto net = reduced_net(5);
  auto grads = net.zero_gradients();
  ForwardTrace<double> empty;
  CHECK_THROWS_AS(net.backward(empty, {0}, grads), Error);
}

TEST_CASE("conv bias gradient equals upstream sum per channel") {
  Rng rng(21);
  Tensor<double> in(5, 5, 1, 1);
  for (Index i = 0; i < in.size(); ++i) in.data()[i] = rng.uniform(-1, 1);
  Tensor<double> w(3, 3, 1, 2);
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-1, 1);
  Tensor<double> gout(3, 3, 2, 1);
  for (Index i = 0; i < gout.size(); ++i) gout.data()[i] = rng.uniform(-1, 1);

  Tensor<double> gw(3, 3, 1, 2);
  VecX<double> gb = VecX<double>::Zero(2);
  conv2d_backward(in, w, gout, static_cast<Tensor<double>*>(nullptr), gw, gb);

  for (Index k = 0; k < 2; ++k) {
    double want = 0;
    for (Index y = 0; y < 3; ++y)
      for (Index x = 0; x < 3; ++x) want += gout(y, x, k);
    CHECK(gb[k] == doctest::Approx(want));
  }
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
  Rng rng(22);
  Tensor<double> in(5, 5, 2, 1);
  for (Index i = 0; i < in.size(); ++i) in.data()[i] = rng.uniform(-1, 1);
  Tensor<double> w(3, 3, 2, 3);
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-1, 1);
  Tensor<double> gout(3, 3, 3, 1);  // all zero
  Tensor<double> gw(3, 3, 2, 3);
  VecX<double> gb = VecX<double>::Zero(3);
  conv2d_backward(in, w, gout, static_cast<Tensor<double>*>(nullptr), gw, gb);
  CHECK(gw.vec().cwiseAbs().maxCoeff() == 0.0);
  CHECK(gb.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sgd: momentum zero is vanilla") {
  auto net = reduced_net(77);
  auto before = net.weights[0].vec().eval();
  auto grads = net.zero_gradients();
  grads.weights[0].vec().setConstant(2.0);
  SgdState<double> state(net);
  sgd_step(net, grads, state, 0.1, 0.0);
  CHECK((net.weights[0].vec() - (before.array() - 0.2).matrix()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("sgd: zero learning rate is a no-op") {
  auto net = reduced_net(78);
  auto before = net.weights[0].vec().eval();
  auto grads = net.zero_gradients();
  grads.weights[0].vec().setConstant(5.0);
  SgdState<double> state(net);
  sgd_step(net, grads, state, 0.0, 0.9);
  CHECK((net.weights[0].vec() - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sgd: two momentum steps with constant gradient") {
  // v1 = -lr g, v2 = 0.9 v1 - lr g; total displacement -lr g (1 + 1.9)
  auto net = reduced_net(79);
  auto before = net.weights[0].vec().eval();
  auto grads = net.zero_gradients();
  grads.weights[0].vec().setConstant(1.0);
  SgdState<double> state(net);
  sgd_step(net, grads, state, 0.01, 0.9);
  sgd_step(net, grads, state, 0.01, 0.9);
  const double total = -0.01 * (1.0 + 1.9);
  CHECK((net.weights[0].vec() - (before.array() + total).matrix()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("xavier: deterministic per seed") {
  auto a = canonical_gesture_network<float>();
  auto b = canonical_gesture_network<float>();
  Rng ra(99), rb(99);
  xavier_init(a, ra);
  xavier_init(b, rb);
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (!a.has_params(i)) continue;
    CHECK(a.weights[i].vec() == b.weights[i].vec());
  }
}

TEST_CASE("xavier: fc2 bound and zero biases") {
  auto net = canonical_gesture_network<double>();
  Rng rng(4);
  xavier_init(net, rng);
  const double bound = std::sqrt(6.0 / (50 + 10));
  CHECK(bound == doctest::Approx(0.3162).epsilon(1e-3));
  auto w = net.weights[8].vec();  // fc2
  CHECK(w.cwiseAbs().maxCoeff() <= bound);
  for (std::size_t i = 0; i < net.layers.size(); ++i)
    if (net.has_params(i)) CHECK(net.biases[i].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("xavier: fc1 sample mean near zero") {
  auto net = canonical_gesture_network<double>();
  Rng rng(5);
  xavier_init(net, rng);
  auto w = net.weights[6].vec();  // fc1, 49000 weights
  REQUIRE(w.size() == 49000);
  const double bound = std::sqrt(6.0 / (980 + 50));
  const double sigma_mean = bound / std::sqrt(3.0) / std::sqrt(49000.0);
  CHECK(std::abs(w.mean()) < 3 * sigma_mean);
}
