#pragma once

#include <cstdint>
#include <vector>

#include "hgr/binarize.hpp"
#include "hgr/dataset.hpp"
#include "hgr/network.hpp"

namespace hgr {

struct TrainConfig {
  std::uint64_t seed = 0;
  int epochs = 30;
  float lr = 0.01f;
  float momentum = 0.9f;
  int batch_size = 32;
  bool xnor_grad_correction = false;  // optional alpha chain-rule term
};

struct EpochLog {
  double mean_loss = 0;
  double accuracy = 0;  // plain argmax accuracy over the (augmented) training set
};

struct TrainLog {
  std::uint64_t seed = 0;
  std::vector<EpochLog> epochs;
};

// Trains the canonical network at full precision on the given samples (all 9
// rotations of each sample are training instances). Deterministic per config.
// Throws on NaN divergence.
Network<float> train_float(const LoadedDataset& dataset,
                           const std::vector<std::size_t>& sample_indices,
                           const TrainConfig& config, TrainLog* log = nullptr);

// Per-iteration binarized training: forward/backward with alpha*B weights,
// SGD on the float shadow, re-binarized at every iteration start. Returns the
// deployment model; the shadow is discarded. If net_out is non-null it
// receives the network carrying the final binarized weights.
BinarizedModel train_binarized(const LoadedDataset& dataset,
                               const std::vector<std::size_t>& sample_indices,
                               const TrainConfig& config, TrainLog* log = nullptr,
                               Network<float>* net_out = nullptr);

}  // namespace hgr
