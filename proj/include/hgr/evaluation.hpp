#pragma once

#include <span>
#include <string>
#include <vector>

#include "hgr/binarize.hpp"
#include "hgr/dataset.hpp"
#include "hgr/network.hpp"
#include "hgr/train.hpp"

namespace hgr {

// 10x10 count grid; rows = true gesture, columns = identified gesture.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  ConfusionMatrix() { counts.setZero(kNumGestures, kNumGestures); }

  void add(int truth, int predicted) {
    require(truth >= 0 && truth < kNumGestures && predicted >= 0 &&
                predicted < kNumGestures,
            "ConfusionMatrix: class index out of range");
    ++counts(truth, predicted);
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    counts += o.counts;
    return *this;
  }

  std::int64_t total() const { return counts.sum(); }

  // Per-class accuracy in percent (diagonal over row sum); every row must
  // have at least one count.
  Eigen::VectorXd class_accuracy_percent() const;

  // Row-normalized percentages rounded to integers, Table-1 style.
  Eigen::MatrixXi row_percent() const;
};

struct SummaryStats {
  double mean_accuracy = 0;  // unweighted mean of the 10 per-class accuracies, percent
  double min_accuracy = 0;
  double variance = 0;  // population variance of the per-class accuracies
};

SummaryStats summary_stats(const ConfusionMatrix& cm);

// Batched probability model; inputs are (50, 50, 1, n) mask tensors, outputs
// (1, 1, 10, n) probabilities.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Tensor<float> probabilities(const Tensor<float>& masks) const = 0;
};

class NetworkClassifier : public Classifier {
 public:
  explicit NetworkClassifier(const Network<float>& net) : net_(net) {}
  Tensor<float> probabilities(const Tensor<float>& masks) const override {
    return net_.forward(masks);
  }

 private:
  const Network<float>& net_;
};

class BinarizedClassifier : public Classifier {
 public:
  explicit BinarizedClassifier(const BinarizedModel& model) : model_(model) {}
  Tensor<float> probabilities(const Tensor<float>& masks) const override {
    return model_.forward(masks);
  }

 private:
  const BinarizedModel& model_;
};

struct VoteResult {
  int cls = 0;
  VecX<float> summed_probabilities;  // over the 9 passes
  std::array<int, 9> votes{};
};

// Majority vote over the 9 rotations' argmax classes; ties break by highest
// summed probability, then lowest class index.
VoteResult vote_classify(const Classifier& model, std::span<const BinaryMask> rotations);

// Votes every listed sample and accumulates a confusion matrix; parallel over
// samples, deterministic accumulation order.
ConfusionMatrix evaluate_samples(const Classifier& model, const LoadedDataset& dataset,
                                 const std::vector<std::size_t>& indices, int threads);

enum class TrainMode { Float, Binarized };

struct FoldResult {
  ConfusionMatrix matrix;
  std::vector<int> test_persons;
  bool failed = false;
  std::string failure;
  TrainLog train_log;
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  ConfusionMatrix merged;  // elementwise sum of fold matrices

  bool any_failed() const {
    for (const auto& f : folds)
      if (f.failed) return true;
    return false;
  }
};

// Per fold: train on the other 3 person groups (with their rotations), vote
// every test original. A diverging fold is marked failed and excluded from
// the merged matrix.
CrossValidationResult run_cross_validation(const LoadedDataset& dataset,
                                           const FoldPlan& plan,
                                           const TrainConfig& config, TrainMode mode,
                                           int threads);

}  // namespace hgr
