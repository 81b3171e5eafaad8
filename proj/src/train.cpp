#include "hgr/train.hpp"

#include <cmath>

#include "hgr/rng.hpp"

namespace hgr {

namespace {

struct Instance {
  std::size_t sample;
  std::size_t rotation;
};

std::vector<Instance> build_instances(const LoadedDataset& dataset,
                                      const std::vector<std::size_t>& sample_indices) {
  std::vector<Instance> instances;
  instances.reserve(sample_indices.size() * kRotationAngles.size());
  for (std::size_t s : sample_indices) {
    require(s < dataset.samples.size(), "train: sample index out of range");
    for (std::size_t r = 0; r < kRotationAngles.size(); ++r)
      instances.push_back({s, r});
  }
  require(!instances.empty(), "train: empty training set");
  return instances;
}

Tensor<float> batch_tensor(const LoadedDataset& dataset, const std::vector<Instance>& all,
                           std::size_t begin, std::size_t end,
                           std::vector<Index>& labels) {
  const Index b = static_cast<Index>(end - begin);
  Tensor<float> batch(50, 50, 1, b);
  labels.resize(static_cast<std::size_t>(b));
  for (std::size_t i = begin; i < end; ++i) {
    const auto& sample = dataset.samples[all[i].sample];
    const BinaryMask& mask = sample.masks[all[i].rotation];
    require(mask.height == 50 && mask.width == 50, "train: mask is not 50x50");
    float* dst = batch.slice(static_cast<Index>(i - begin));
    for (std::size_t p = 0; p < mask.values.size(); ++p)
      dst[p] = static_cast<float>(mask.values[p]);
    labels[i - begin] = sample.gesture;
  }
  return batch;
}

// Shared epoch loop; `step` consumes one batch and returns its summed loss.
template <typename StepFn>
void run_epochs(const LoadedDataset& dataset, const std::vector<std::size_t>& indices,
                const TrainConfig& config, TrainLog* log, StepFn&& step) {
  require(config.epochs >= 1, "train: epochs must be >= 1");
  require(config.batch_size >= 1, "train: batch size must be >= 1");
  auto instances = build_instances(dataset, indices);
  if (log != nullptr) {
    log->seed = config.seed;
    log->epochs.clear();
  }

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(config.seed, 0x5f0f, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(instances);

    double loss_sum = 0;
    std::size_t correct = 0;
    std::vector<Index> labels;
    for (std::size_t begin = 0; begin < instances.size(); begin += config.batch_size) {
      const std::size_t end =
          std::min(instances.size(), begin + static_cast<std::size_t>(config.batch_size));
      Tensor<float> batch = batch_tensor(dataset, instances, begin, end, labels);
      loss_sum += step(batch, labels, &correct);
    }
    const double mean_loss = loss_sum / static_cast<double>(instances.size());
    if (!std::isfinite(mean_loss))
      throw Error("train: NaN loss divergence at epoch " + std::to_string(epoch + 1));
    if (log != nullptr)
      log->epochs.push_back(
          {mean_loss, static_cast<double>(correct) / static_cast<double>(instances.size())});
  }
}

std::size_t count_correct(const Tensor<float>& probs, const std::vector<Index>& labels) {
  std::size_t correct = 0;
  for (Index n = 0; n < probs.count(); ++n) {
    Index best = 0;
    probs.slice_vec(n).maxCoeff(&best);
    if (best == labels[static_cast<std::size_t>(n)]) ++correct;
  }
  return correct;
}

}  // namespace

Network<float> train_float(const LoadedDataset& dataset,
                           const std::vector<std::size_t>& sample_indices,
                           const TrainConfig& config, TrainLog* log) {
  Network<float> net = canonical_gesture_network<float>();
  Rng init_rng(derive_seed(config.seed, 0x1417));
  xavier_init(net, init_rng);
  SgdState<float> state(net);

  run_epochs(dataset, sample_indices, config, log,
             [&](const Tensor<float>& batch, const std::vector<Index>& labels,
                 std::size_t* correct) -> double {
               auto grads = net.zero_gradients();
               auto trace = net.forward_trace(batch);
               const float loss = net.backward(trace, labels, grads);
               *correct += count_correct(trace.output(), labels);
               const float inv = 1.f / static_cast<float>(batch.count());
               for (auto& g : grads.weights)
                 if (!g.empty()) g.vec() *= inv;
               for (auto& g : grads.biases) g *= inv;
               sgd_step(net, grads, state, config.lr, config.momentum);
               return static_cast<double>(loss);
             });
  return net;
}

BinarizedModel train_binarized(const LoadedDataset& dataset,
                               const std::vector<std::size_t>& sample_indices,
                               const TrainConfig& config, TrainLog* log,
                               Network<float>* net_out) {
  Network<float> net = canonical_gesture_network<float>();
  Rng init_rng(derive_seed(config.seed, 0x1417));
  xavier_init(net, init_rng);
  BinarizedTrainer trainer(net, config.xnor_grad_correction);

  run_epochs(dataset, sample_indices, config, log,
             [&](const Tensor<float>& batch, const std::vector<Index>& labels,
                 std::size_t* correct) -> double {
               Tensor<float> probs;
               const float loss =
                   trainer.step(batch, labels, config.lr, config.momentum, &probs);
               *correct += count_correct(probs, labels);
               return static_cast<double>(loss);
             });

  trainer.rebinarize();  // sync working weights with the final shadow state
  if (net_out != nullptr) *net_out = net;
  return binarize_model(net);
}

}  // namespace hgr
