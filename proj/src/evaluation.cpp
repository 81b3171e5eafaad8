#include "hgr/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "hgr/parallel.hpp"
#include "hgr/rng.hpp"

namespace hgr {

Eigen::VectorXd ConfusionMatrix::class_accuracy_percent() const {
  Eigen::VectorXd acc(kNumGestures);
  for (int i = 0; i < kNumGestures; ++i) {
    const std::int64_t row_sum = counts.row(i).sum();
    require(row_sum > 0, "summary_stats: class " + std::to_string(i) + " has no samples");
    acc[i] = 100.0 * static_cast<double>(counts(i, i)) / static_cast<double>(row_sum);
  }
  return acc;
}

Eigen::MatrixXi ConfusionMatrix::row_percent() const {
  Eigen::MatrixXi p(kNumGestures, kNumGestures);
  for (int i = 0; i < kNumGestures; ++i) {
    const std::int64_t row_sum = counts.row(i).sum();
    for (int j = 0; j < kNumGestures; ++j)
      p(i, j) = row_sum == 0
                    ? 0
                    : static_cast<int>(std::lround(100.0 * static_cast<double>(counts(i, j)) /
                                                   static_cast<double>(row_sum)));
  }
  return p;
}

SummaryStats summary_stats(const ConfusionMatrix& cm) {
  const Eigen::VectorXd acc = cm.class_accuracy_percent();
  SummaryStats s;
  s.mean_accuracy = acc.mean();
  s.min_accuracy = acc.minCoeff();
  s.variance = (acc.array() - s.mean_accuracy).square().mean();
  return s;
}

VoteResult vote_classify(const Classifier& model, std::span<const BinaryMask> rotations) {
  require(rotations.size() == kRotationAngles.size(),
          "vote_classify: expected 9 rotations, got " + std::to_string(rotations.size()));

  Tensor<float> batch(50, 50, 1, static_cast<Index>(rotations.size()));
  for (std::size_t r = 0; r < rotations.size(); ++r) {
    const BinaryMask& m = rotations[r];
    require(m.height == 50 && m.width == 50, "vote_classify: mask is not 50x50");
    float* dst = batch.slice(static_cast<Index>(r));
    for (std::size_t p = 0; p < m.values.size(); ++p)
      dst[p] = static_cast<float>(m.values[p]);
  }

  const Tensor<float> probs = model.probabilities(batch);
  require(probs.slice_size() == kNumGestures && probs.count() == 9,
          "vote_classify: classifier returned unexpected shape");

  VoteResult r;
  r.summed_probabilities = VecX<float>::Zero(kNumGestures);
  std::array<int, 10> tally{};
  for (Index n = 0; n < 9; ++n) {
    Index best = 0;
    probs.slice_vec(n).maxCoeff(&best);
    r.votes[static_cast<std::size_t>(n)] = static_cast<int>(best);
    ++tally[static_cast<std::size_t>(best)];
    r.summed_probabilities += probs.slice_vec(n);
  }

  int best_class = 0;
  for (int c = 1; c < kNumGestures; ++c) {
    if (tally[c] > tally[best_class] ||
        (tally[c] == tally[best_class] &&
         r.summed_probabilities[c] > r.summed_probabilities[best_class]))
      best_class = c;
  }
  r.cls = best_class;
  return r;
}

ConfusionMatrix evaluate_samples(const Classifier& model, const LoadedDataset& dataset,
                                 const std::vector<std::size_t>& indices, int threads) {
  std::vector<int> predicted(indices.size());
  parallel_for(static_cast<Index>(indices.size()), threads, [&](Index i) {
    const auto& sample = dataset.samples[indices[static_cast<std::size_t>(i)]];
    predicted[static_cast<std::size_t>(i)] =
        vote_classify(model, std::span<const BinaryMask>(sample.masks)).cls;
  });

  ConfusionMatrix cm;
  for (std::size_t i = 0; i < indices.size(); ++i)
    cm.add(dataset.samples[indices[i]].gesture, predicted[i]);
  return cm;
}

CrossValidationResult run_cross_validation(const LoadedDataset& dataset,
                                           const FoldPlan& plan, const TrainConfig& config,
                                           TrainMode mode, int threads) {
  require(plan.groups.size() == 4, "run_cross_validation: expected a 4-group fold plan");
  CrossValidationResult result;
  result.folds.resize(4);

  const int fold_workers = std::max(1, std::min(4, threads));
  const int inner_threads = std::max(1, threads / fold_workers);

  parallel_for(4, fold_workers, [&](Index fold) {
    FoldResult& fr = result.folds[static_cast<std::size_t>(fold)];
    fr.test_persons = plan.groups[static_cast<std::size_t>(fold)];

    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
      if (plan.is_test(static_cast<int>(fold), dataset.samples[i].person_id))
        test_idx.push_back(i);
      else
        train_idx.push_back(i);
    }

    TrainConfig fold_config = config;
    fold_config.seed = derive_seed(config.seed, 0xf07d, static_cast<std::uint64_t>(fold));
    try {
      if (mode == TrainMode::Float) {
        const Network<float> net =
            train_float(dataset, train_idx, fold_config, &fr.train_log);
        fr.matrix = evaluate_samples(NetworkClassifier(net), dataset, test_idx,
                                     inner_threads);
      } else {
        const BinarizedModel model =
            train_binarized(dataset, train_idx, fold_config, &fr.train_log);
        fr.matrix = evaluate_samples(BinarizedClassifier(model), dataset, test_idx,
                                     inner_threads);
      }
    } catch (const Error& e) {
      fr.failed = true;
      fr.failure = e.what();
    }
  });

  for (const auto& fr : result.folds)
    if (!fr.failed) result.merged += fr.matrix;
  return result;
}

}  // namespace hgr
